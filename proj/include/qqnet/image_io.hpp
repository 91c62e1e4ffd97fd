#pragma once

#include <filesystem>
#include <variant>

#include "qqnet/image.hpp"

namespace qqnet {

using LoadedImage = std::variant<ImagePlane, ColourImage>;

/// Reads PGM (P2/P5), PPM (P3/P6) or PNG (8/16-bit grey or RGB).
/// Intensities are scaled to [0,1] by the format's maximum value.
/// Throws DataError for unreadable, unsupported or empty images.
LoadedImage load_image(const std::filesystem::path& path);

/// Loads any supported image as a single grey plane (luma for colour input).
ImagePlane load_grey(const std::filesystem::path& path);

/// Writes an 8- or 16-bit binary PGM. Values are clamped to [0,1] unless
/// `rescale` is set, in which case the plane's [min,max] is stretched to it.
void save_pgm(const std::filesystem::path& path, const ImagePlane& img, bool rescale = false,
              int bit_depth = 8);

/// Writes an 8-bit binary PPM from channels in [0,1].
void save_ppm(const std::filesystem::path& path, const ColourImage& img);

/// Writes an 8- or 16-bit PNG. `alpha` adds an opaque alpha channel; the
/// loader rejects such files, which is what the tests use it for.
void save_png(const std::filesystem::path& path, const ImagePlane& img, int bit_depth = 8,
              bool alpha = false);
void save_png(const std::filesystem::path& path, const ColourImage& img, int bit_depth = 8,
              bool alpha = false);

}  // namespace qqnet

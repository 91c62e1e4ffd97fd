#include "qqnet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace qqnet {

namespace {

std::string path_str(const std::filesystem::path& p) { return p.string(); }

// --- Netpbm -----------------------------------------------------------------

class PnmReader {
 public:
  explicit PnmReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw DataError("malformed netpbm header");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1L << 30)) throw DataError("netpbm value out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DataError("malformed netpbm header");
    }
    ++pos_;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  const unsigned char* cursor() const { return bytes_.data() + pos_; }
  std::size_t pos_ = 2;

 private:
  std::vector<unsigned char> bytes_;
};

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image file: " + path_str(path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

LoadedImage load_pnm(std::vector<unsigned char> bytes, const std::filesystem::path& path) {
  const char kind = static_cast<char>(bytes[1]);
  const bool ascii = kind == '2' || kind == '3';
  const int nchan = (kind == '2' || kind == '5') ? 1 : 3;
  PnmReader rd(std::move(bytes));
  const long w = rd.read_int();
  const long h = rd.read_int();
  const long maxval = rd.read_int();
  if (w <= 0 || h <= 0) throw DataError("zero-dimension image: " + path_str(path));
  if (maxval <= 0 || maxval > 65535) throw DataError("invalid netpbm maxval: " + path_str(path));

  const auto npix = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> samples(npix * nchan);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (ascii) {
    for (auto& s : samples) {
      const long v = rd.read_int();
      if (v > maxval) throw DataError("netpbm sample exceeds maxval: " + path_str(path));
      s = static_cast<double>(v) * scale;
    }
  } else {
    rd.skip_single_space();
    const std::size_t bps = maxval > 255 ? 2 : 1;
    if (rd.remaining() < samples.size() * bps) {
      throw DataError("truncated netpbm data: " + path_str(path));
    }
    const unsigned char* p = rd.cursor();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const unsigned v = bps == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
      samples[i] = static_cast<double>(std::min<long>(v, maxval)) * scale;
    }
  }

  const auto uw = static_cast<std::size_t>(w);
  const auto uh = static_cast<std::size_t>(h);
  if (nchan == 1) return ImagePlane(uw, uh, std::move(samples));
  ColourImage img;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> plane(npix);
    for (std::size_t i = 0; i < npix; ++i) plane[i] = samples[3 * i + c];
    img.channels[c] = ImagePlane(uw, uh, std::move(plane));
  }
  return img;
}

// --- PNG --------------------------------------------------------------------

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngHeader {
  png_uint_32 width;
  png_uint_32 height;
  int bit_depth;
  int colour_type;
  int channels;
  int has_alpha;
  png_size_t rowbytes;
};

// libpng reports errors by longjmp; these helpers keep only trivially
// destructible locals between setjmp and the libpng calls.
bool png_read_header(png_structp png, png_infop info, std::FILE* fp, PngHeader* hdr) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  png_get_IHDR(png, info, &hdr->width, &hdr->height, &hdr->bit_depth, &hdr->colour_type, nullptr,
               nullptr, nullptr);
  hdr->has_alpha = (hdr->colour_type & PNG_COLOR_MASK_ALPHA) != 0 ||
                   png_get_valid(png, info, PNG_INFO_tRNS) != 0;
  if (hdr->has_alpha || hdr->width == 0 || hdr->height == 0) return true;
  if (hdr->colour_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (hdr->colour_type == PNG_COLOR_TYPE_GRAY && hdr->bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_read_update_info(png, info);
  hdr->bit_depth = png_get_bit_depth(png, info);
  hdr->channels = png_get_channels(png, info);
  hdr->rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool png_read_rows(png_structp png, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

LoadedImage load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path_str(path).c_str(), "rb"));
  if (!fp) throw DataError("cannot open image file: " + path_str(path));

  PngReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw DataError("libpng initialisation failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw DataError("libpng initialisation failed");

  PngHeader hdr{};
  if (!png_read_header(g.png, g.info, fp.get(), &hdr)) {
    throw DataError("corrupt PNG file: " + path_str(path));
  }
  if (hdr.has_alpha) throw DataError("unsupported channel layout (alpha): " + path_str(path));
  if (hdr.width == 0 || hdr.height == 0) throw DataError("zero-dimension image: " + path_str(path));
  if (hdr.channels != 1 && hdr.channels != 3) {
    throw DataError("unsupported channel layout: " + path_str(path));
  }

  const std::size_t w = hdr.width;
  const std::size_t h = hdr.height;
  std::vector<png_byte> buffer(hdr.rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) rows[y] = buffer.data() + y * hdr.rowbytes;
  if (!png_read_rows(g.png, rows.data())) throw DataError("corrupt PNG file: " + path_str(path));

  const bool wide = hdr.bit_depth == 16;
  const double scale = wide ? 1.0 / 65535.0 : 1.0 / 255.0;
  auto sample = [&](std::size_t y, std::size_t i) -> double {
    const png_byte* r = rows[y];
    if (wide) return static_cast<double>((unsigned{r[2 * i]} << 8) | r[2 * i + 1]) * scale;
    return static_cast<double>(r[i]) * scale;
  };
  if (hdr.channels == 1) {
    ImagePlane img(w, h);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) img(x, y) = sample(y, x);
    return img;
  }
  ColourImage img;
  for (auto& c : img.channels) c = ImagePlane(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.channels[c](x, y) = sample(y, 3 * x + c);
  return img;
}

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

bool png_write_all(png_structp png, png_infop info, std::FILE* fp, png_uint_32 w, png_uint_32 h,
                   int bit_depth, int colour_type, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, bit_depth, colour_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

void write_png(const std::filesystem::path& path, const ImagePlane* const* planes, int nplanes,
               int bit_depth, bool alpha) {
  if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("PNG bit depth must be 8 or 16");
  const std::size_t w = planes[0]->width();
  const std::size_t h = planes[0]->height();
  FilePtr fp(std::fopen(path_str(path).c_str(), "wb"));
  if (!fp) throw DataError("cannot write file: " + path_str(path));
  PngWriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw DataError("libpng initialisation failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw DataError("libpng initialisation failed");

  const int out_channels = nplanes + (alpha ? 1 : 0);
  const int colour_type = nplanes == 1 ? (alpha ? PNG_COLOR_TYPE_GRAY_ALPHA : PNG_COLOR_TYPE_GRAY)
                                       : (alpha ? PNG_COLOR_TYPE_RGB_ALPHA : PNG_COLOR_TYPE_RGB);
  const std::size_t bps = bit_depth / 8;
  const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<png_byte> buffer(w * h * out_channels * bps);
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) {
    rows[y] = buffer.data() + y * w * out_channels * bps;
    for (std::size_t x = 0; x < w; ++x) {
      for (int c = 0; c < out_channels; ++c) {
        const double v = c < nplanes ? std::clamp((*planes[c])(x, y), 0.0, 1.0) : 1.0;
        const auto q = static_cast<unsigned>(std::lround(v * maxv));
        png_byte* dst = rows[y] + (x * out_channels + c) * bps;
        if (bps == 2) {
          dst[0] = static_cast<png_byte>(q >> 8);
          dst[1] = static_cast<png_byte>(q & 0xff);
        } else {
          dst[0] = static_cast<png_byte>(q);
        }
      }
    }
  }
  if (!png_write_all(g.png, g.info, fp.get(), static_cast<png_uint_32>(w),
                     static_cast<png_uint_32>(h), bit_depth, colour_type, rows.data())) {
    throw DataError("PNG write failed: " + path_str(path));
  }
}

}  // namespace

LoadedImage load_image(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
      bytes[3] == 'G') {
    return load_png(path);
  }
  if (bytes.size() >= 3 && bytes[0] == 'P' &&
      (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6')) {
    return load_pnm(std::move(bytes), path);
  }
  throw DataError("unsupported image format: " + path_str(path));
}

ImagePlane load_grey(const std::filesystem::path& path) {
  auto img = load_image(path);
  if (auto* plane = std::get_if<ImagePlane>(&img)) return std::move(*plane);
  return to_grey(std::get<ColourImage>(img));
}

void save_pgm(const std::filesystem::path& path, const ImagePlane& img, bool rescale,
              int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("PGM bit depth must be 8 or 16");
  if (img.empty()) throw InvalidArgument("save_pgm: empty image");
  double lo = 0.0, hi = 1.0;
  if (rescale) {
    const auto [mn, mx] = std::minmax_element(img.values().begin(), img.values().end());
    lo = *mn;
    hi = *mx > *mn ? *mx : *mn + 1.0;
  }
  const int maxval = bit_depth == 16 ? 65535 : 255;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path_str(path));
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  for (double v : img.values()) {
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    const auto q = static_cast<unsigned>(std::lround(t * maxval));
    if (bit_depth == 16) out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xff));
  }
  if (!out) throw DataError("write failed: " + path_str(path));
}

void save_ppm(const std::filesystem::path& path, const ColourImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path_str(path));
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      for (const auto& c : img.channels)
        out.put(static_cast<char>(std::lround(std::clamp(c(x, y), 0.0, 1.0) * 255.0)));
  if (!out) throw DataError("write failed: " + path_str(path));
}

void save_png(const std::filesystem::path& path, const ImagePlane& img, int bit_depth, bool alpha) {
  const ImagePlane* planes[] = {&img};
  write_png(path, planes, 1, bit_depth, alpha);
}

void save_png(const std::filesystem::path& path, const ColourImage& img, int bit_depth,
              bool alpha) {
  const ImagePlane* planes[] = {&img.channels[0], &img.channels[1], &img.channels[2]};
  write_png(path, planes, 3, bit_depth, alpha);
}

}  // namespace qqnet

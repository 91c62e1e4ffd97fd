#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qqnet/image.hpp"
#include "qqnet/quad1d.hpp"
#include "qqnet/scalespace.hpp"

namespace qqnet {

/// M orientations phi_i = i * pi / M uniformly covering [0, pi).
class OrientationSet {
 public:
  explicit OrientationSet(int M);

  int size() const noexcept { return M_; }
  double angle(int i) const;

 private:
  int M_;
};

/// Directional derivatives L_phi and L_phiphi steered from the axis partials.
std::pair<ImagePlane, ImagePlane> steer(const DerivativeSet& d, double phi);

/// Pointwise sqrt((s L_phi^2 + C s^2 L_phiphi^2) / s^Gamma) for the isotropic
/// case (directional variance equal to s).
ImagePlane oriented_qq(const DerivativeSet& d, double phi, const QuadratureParams& p);

/// The measure above from already-steered derivative planes at scale s.
ImagePlane quadrature_from_steered(const ImagePlane& L_phi, const ImagePlane& L_phiphi, double s,
                                   const QuadratureParams& p);

/// Q plus, optionally, the steered derivatives it was built from.
struct OrientedChannel {
  double phi = 0.0;
  ImagePlane q;
  ImagePlane L_phi;     // empty unless requested
  ImagePlane L_phiphi;  // empty unless requested
};

struct OrientedResponse {
  double s = 0.0;
  QuadratureParams params;
  std::vector<OrientedChannel> channels;
};

OrientedResponse oriented_response(const DerivativeSet& d, const OrientationSet& orientations,
                                   const QuadratureParams& p, bool keep_steered = false);

/// sqrt(g(.; s_int) * Q^2): spatial pooling of the squared measure.
ImagePlane post_smooth_qq(const ImagePlane& q, double s_int);

}  // namespace qqnet

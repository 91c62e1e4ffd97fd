#include "qqnet/oriented.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace qqnet {

OrientationSet::OrientationSet(int M) : M_(M) {
  if (M < 2) throw InvalidArgument("orientation count M must be >= 2");
}

double OrientationSet::angle(int i) const {
  if (i < 0 || i >= M_) throw InvalidArgument("orientation index out of range");
  return static_cast<double>(i) * std::numbers::pi / static_cast<double>(M_);
}

namespace {

void check_shapes(const DerivativeSet& d) {
  if (!d.Lx.same_shape(d.Ly) || !d.Lx.same_shape(d.Lxx) || !d.Lx.same_shape(d.Lxy) ||
      !d.Lx.same_shape(d.Lyy)) {
    throw InvalidArgument("derivative planes must share dimensions");
  }
}

}  // namespace

std::pair<ImagePlane, ImagePlane> steer(const DerivativeSet& d, double phi) {
  check_shapes(d);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double cc = c * c, cs2 = 2.0 * c * s, ss = s * s;
  ImagePlane lp(d.Lx.width(), d.Lx.height());
  ImagePlane lpp(d.Lx.width(), d.Lx.height());
  const auto lx = d.Lx.values(), ly = d.Ly.values();
  const auto lxx = d.Lxx.values(), lxy = d.Lxy.values(), lyy = d.Lyy.values();
  auto a = lp.values();
  auto b = lpp.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = c * lx[i] + s * ly[i];
    b[i] = cc * lxx[i] + cs2 * lxy[i] + ss * lyy[i];
  }
  return {std::move(lp), std::move(lpp)};
}

ImagePlane quadrature_from_steered(const ImagePlane& L_phi, const ImagePlane& L_phiphi, double s,
                                   const QuadratureParams& p) {
  if (!(s > 0.0)) throw InvalidArgument("oriented quasi quadrature: scale must be positive");
  if (!L_phi.same_shape(L_phiphi)) throw InvalidArgument("steered planes must share dimensions");
  const double w1 = s / std::pow(s, p.Gamma);
  const double w2 = p.C * s * s / std::pow(s, p.Gamma);
  ImagePlane q(L_phi.width(), L_phi.height());
  auto out = q.values();
  const auto a = L_phi.values();
  const auto b = L_phiphi.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(w1 * a[i] * a[i] + w2 * b[i] * b[i]);
  return q;
}

ImagePlane oriented_qq(const DerivativeSet& d, double phi, const QuadratureParams& p) {
  const auto [lp, lpp] = steer(d, phi);
  return quadrature_from_steered(lp, lpp, d.s, p);
}

OrientedResponse oriented_response(const DerivativeSet& d, const OrientationSet& orientations,
                                   const QuadratureParams& p, bool keep_steered) {
  OrientedResponse r;
  r.s = d.s;
  r.params = p;
  r.channels.reserve(static_cast<std::size_t>(orientations.size()));
  for (int i = 0; i < orientations.size(); ++i) {
    OrientedChannel ch;
    ch.phi = orientations.angle(i);
    ch.q = oriented_qq(d, ch.phi, p);
    if (keep_steered) std::tie(ch.L_phi, ch.L_phiphi) = steer(d, ch.phi);
    r.channels.push_back(std::move(ch));
  }
  return r;
}

ImagePlane post_smooth_qq(const ImagePlane& q, double s_int) {
  if (s_int < 0.0) throw InvalidArgument("post_smooth_qq: integration scale must be >= 0");
  if (s_int == 0.0) return q;
  ImagePlane sq(q.width(), q.height());
  auto dst = sq.values();
  const auto src = q.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] * src[i];
  ImagePlane pooled = smooth(sq, s_int);
  for (auto& v : pooled.values()) v = std::sqrt(std::max(v, 0.0));
  return pooled;
}

}  // namespace qqnet

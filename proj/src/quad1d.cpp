#include "qqnet/quad1d.hpp"

#include <cmath>
#include <numbers>

#include "qqnet/image.hpp"
#include "qqnet/scalespace.hpp"

namespace qqnet {

void QuadratureParams::validate() const {
  if (!(C >= 0.0) || !std::isfinite(C)) throw InvalidArgument("quadrature weight C must be >= 0");
  if (!std::isfinite(Gamma)) throw InvalidArgument("Gamma must be finite");
}

double quasi_quadrature_1d(double Lx, double Lxx, double s, const QuadratureParams& p) {
  if (!(s > 0.0)) throw InvalidArgument("quasi_quadrature_1d: scale must be positive");
  const double energy = s * Lx * Lx + p.C * s * s * Lxx * Lxx;
  return std::sqrt(energy / std::pow(s, p.Gamma));
}

double optimal_C(double s, double s0) {
  if (!(s > 0.0) || !(s0 > 0.0)) throw InvalidArgument("optimal_C: scales must be positive");
  return 4.0 * (s + s0) / (11.0 * s);
}

double ripple_energy(double C, double s, double s0) {
  // Q^2 = g^2 P with L = g(x; S), S = s + s0, and
  // P = s x^2 / S^2 + C s^2 (x^2 - S)^2 / S^4.
  const double S = s + s0;
  const double unit = std::sqrt(S / 2.0);
  const double half_width = 20.0 * unit;
  const double h = 1e-3 * unit;
  const auto n = static_cast<long>(std::llround(2.0 * half_width / h));
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * S);
  auto integrand = [&](double x) {
    const double g = norm * std::exp(-x * x / (2.0 * S));
    const double q = x * x - S;
    const double P = s * x * x / (S * S) + C * s * s * q * q / (S * S * S * S);
    const double dP = 2.0 * s * x / (S * S) + 4.0 * C * s * s * q * x / (S * S * S * S);
    const double d = g * g * (dP - 2.0 * x / S * P);
    return d * d;
  };
  double acc = 0.5 * (integrand(-half_width) + integrand(half_width));
  for (long i = 1; i < n; ++i) acc += integrand(-half_width + static_cast<double>(i) * h);
  return acc * h;
}

double optimal_C_numeric(double s, double s0) {
  if (!(s > 0.0) || !(s0 > 0.0)) throw InvalidArgument("optimal_C_numeric: scales must be positive");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = ripple_energy(c, s, s0);
  double fd = ripple_energy(d, s, s0);
  while (b - a > 1e-9) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = ripple_energy(c, s, s0);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = ripple_energy(d, s, s0);
    }
  }
  return 0.5 * (a + b);
}

namespace {

// m-th x-derivative of the 2-D Gaussian g(x, y; S) at the origin.
double gaussian2d_xderiv_at_origin(int m, double S) {
  const double g0 = 1.0 / (2.0 * std::numbers::pi * S);
  switch (m) {
    case 0: return g0;
    case 2: return -g0 / S;
    case 4: return 3.0 * g0 / (S * S);
    default: return 0.0;  // odd orders vanish by symmetry
  }
}

void check_order(int n) {
  if (n < 0 || n > 2) throw InvalidArgument("input order must be 0, 1 or 2");
}

}  // namespace

double q_at_origin(int input_order, double s, double s0, const QuadratureParams& p) {
  check_order(input_order);
  if (!(s > 0.0) || !(s0 > 0.0)) throw InvalidArgument("q_at_origin: scales must be positive");
  // Semigroup: smoothing s0^(n/2) g_{x^n}(.; s0) at scale s gives
  // s0^(n/2) g_{x^n}(.; s + s0).
  const double S = s + s0;
  const double amp = std::pow(s0, input_order / 2.0);
  const double Lx = amp * gaussian2d_xderiv_at_origin(input_order + 1, S);
  const double Lxx = amp * gaussian2d_xderiv_at_origin(input_order + 2, S);
  return quasi_quadrature_1d(Lx, Lxx, s, p);
}

std::vector<std::pair<double, double>> scale_response_curve(int input_order, double s0,
                                                            std::span<const double> s_grid,
                                                            const QuadratureParams& p) {
  check_order(input_order);
  std::vector<std::pair<double, double>> out;
  out.reserve(s_grid.size());
  double prev = 0.0;
  for (double s : s_grid) {
    if (!(s > prev)) throw InvalidArgument("scale grid must be positive and ascending");
    prev = s;
    out.emplace_back(s, q_at_origin(input_order, s, s0, p));
  }
  return out;
}

double argmax_over_scale(int input_order, double s0, double Gamma) {
  check_order(input_order);
  if (!(s0 > 0.0)) throw InvalidArgument("argmax_over_scale: s0 must be positive");
  double num = 0.0, den = 0.0;
  switch (input_order) {
    case 0: num = 2.0 - Gamma; den = 2.0 + Gamma; break;
    case 1: num = 1.0 - Gamma; den = 3.0 + Gamma; break;
    default: num = 2.0 - Gamma; den = 4.0 + Gamma; break;
  }
  if (!(num > 0.0) || !(den > 0.0)) {
    throw InvalidArgument("no interior maximum over scale for this input order and Gamma");
  }
  return s0 * num / den;
}

double discrete_q_at_origin(int input_order, double s, double s0, const QuadratureParams& p) {
  check_order(input_order);
  if (!(s0 > 0.0)) throw InvalidArgument("discrete_q_at_origin: s0 must be positive");
  const double sigma = std::sqrt(s);
  const auto k0 = make_kernel(sigma, 0);
  const auto k1 = make_kernel(sigma, 1);
  const auto k2 = make_kernel(sigma, 2);

  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * s0);
  auto g = [&](double x) { return norm * std::exp(-x * x / (2.0 * s0)); };
  auto input_x = [&](double x) {
    switch (input_order) {
      case 0: return g(x);
      case 1: return std::sqrt(s0) * (-x / s0) * g(x);
      default: return s0 * (x * x / (s0 * s0) - 1.0 / s0) * g(x);
    }
  };
  auto at_origin = [](const GaussianKernel& k, auto&& f) {
    double acc = 0.0;
    for (int t = -k.radius; t <= k.radius; ++t) acc += k.tap(t) * f(-static_cast<double>(t));
    return acc;
  };
  const double y_factor = at_origin(k0, g);
  const double Lx = at_origin(k1, input_x) * y_factor;
  const double Lxx = at_origin(k2, input_x) * y_factor;
  return quasi_quadrature_1d(Lx, Lxx, s, p);
}

std::vector<double> geometric_grid(double s_min, double s_max, double ratio) {
  if (!(s_min > 0.0) || !(s_max >= s_min) || !(ratio > 1.0)) {
    throw InvalidArgument("geometric_grid: need 0 < s_min <= s_max and ratio > 1");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double s = s_min * std::pow(ratio, i);
    if (s > s_max * (1.0 + 1e-12)) break;
    grid.push_back(s);
  }
  return grid;
}

}  // namespace qqnet

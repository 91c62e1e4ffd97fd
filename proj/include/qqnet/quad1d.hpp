#pragma once

#include <span>
#include <utility>
#include <vector>

namespace qqnet {

/// Weighting between second- and first-order energy and the complementary
/// scale-normalisation parameter (gamma_1 = 1 - Gamma, gamma_2 = 1 - Gamma/2).
struct QuadratureParams {
  double C = 8.0 / 11.0;
  double Gamma = 0.0;

  void validate() const;
};

/// sqrt((s Lx^2 + C s^2 Lxx^2) / s^Gamma) from un-normalised derivatives.
double quasi_quadrature_1d(double Lx, double Lxx, double s, const QuadratureParams& p);

/// Closed-form ripple-minimising weight 4 (s + s0) / (11 s).
double optimal_C(double s, double s0);

/// Minimises the integrated squared x-derivative of Q^2 over C in [0, 2] for
/// a Gaussian blob of variance s0 at scale s (Gamma = 0), by trapezoidal
/// integration and golden-section search.
double optimal_C_numeric(double s, double s0);

/// Integrated ripple as a function of C; exposed for the search above.
double ripple_energy(double C, double s, double s0);

/// Q at the origin for the model inputs s0^(n/2) d^n/dx^n g(x, y; s0),
/// n in {0, 1, 2}, where g is the 2-D Gaussian and Q measures along x.
double q_at_origin(int input_order, double s, double s0, const QuadratureParams& p);

/// Evaluates q_at_origin over a positive ascending grid.
std::vector<std::pair<double, double>> scale_response_curve(int input_order, double s0,
                                                            std::span<const double> s_grid,
                                                            const QuadratureParams& p);

/// Scale of maximal q_at_origin response. Throws InvalidArgument when the
/// response has no interior maximum (e.g. n = 1 with Gamma >= 1).
double argmax_over_scale(int input_order, double s0, double Gamma);

/// The same quantity as q_at_origin, computed by the discrete pipeline:
/// a sampled model input convolved with sampled Gaussian derivative kernels.
/// The 2-D input is separable, so the value at the origin is the product of
/// two 1-D convolutions.
double discrete_q_at_origin(int input_order, double s, double s0, const QuadratureParams& p);

/// Geometric scale grid s_min * ratio^i up to s_max inclusive.
std::vector<double> geometric_grid(double s_min, double s_max, double ratio);

}  // namespace qqnet

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace eqcapm {

/// Half-line integration of smooth integrands with algebraic or faster tails.
/// Panels [0, s0], [s0, 2 s0], [2 s0, 4 s0], ... each use composite 64-point
/// Gauss-Legendre; subintervals per panel are doubled until two successive
/// estimates agree. Panels stop once two consecutive panels contribute below
/// tolerance or the truncation point is passed.
struct QuadratureConfig {
  double truncation = 0.0;  // 0: derived from the transform bound
  double first_panel = 1.0;
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int max_panels = 64;
  int max_subdivisions = 1 << 15;

  void validate() const;
};

struct QuadratureResult {
  std::vector<double> values;
  std::vector<double> abs_error;
  double upper = 0.0;  // last integration point reached
  std::size_t evaluations = 0;
};

using VectorIntegrand = std::function<void(double s, std::span<double> out)>;

/// Integral over [0, upper) of a vector-valued integrand; `tail_limit` is
/// the truncation L beyond which the tail is known to be below tolerance.
QuadratureResult integrate_half_line(const VectorIntegrand& f, std::size_t dim,
                                     const QuadratureConfig& cfg, double tail_limit);

/// Fixed 64-point rule mapped to [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

}  // namespace eqcapm

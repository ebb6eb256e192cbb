#pragma once

// Fourier pricing of securities with payoffs f^k(X_T) in the exponential-
// utility equilibrium: ratio form, gradient form, linear special case and the
// zero-supply call.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "eqcapm/affine_core.hpp"
#include "eqcapm/equilibrium.hpp"
#include "eqcapm/quadrature.hpp"

namespace eqcapm {

/// Payoff configuration priced jointly: one pricing-kernel weight per security.
struct PricingProblem {
  std::vector<PayoffDescriptor> payoffs;
  std::vector<double> tilde_gamma;
  double horizon = 0.0;

  static PricingProblem from_market(const MarketSpec& m);
  void validate() const;
};

/// Damping exponents: alphas[k] for the k-th numerator, beta for the
/// normalizer. lower/upper bound the open window of admissible exponents for
/// the normalizer and for linear-payoff numerators.
struct DampingPlan {
  std::vector<double> alphas;
  double beta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct DampingWindow {
  double lower = 0.0;  // sum of weights on linear payoffs
  double upper = 0.0;  // sum of all weights
};

DampingWindow damping_window(const PricingProblem& pb);

/// alpha = beta = window midpoint for linear payoffs, alpha = 0 for calls.
DampingPlan default_damping(const PricingProblem& pb);

/// Throws InvalidDamping when some exponent is outside its window.
void validate_damping(const PricingProblem& pb, const DampingPlan& d);

/// Fourier transform s -> int e^{-isy} g(y) dy with a decay bound
/// |g^(s)| <= m_hat / (s^2 + z_hat).
struct DampedTransform {
  std::function<cplx(double)> evaluator;
  double m_hat = 0.0;
  double z_hat = 1.0;

  cplx operator()(double s) const { return evaluator(s); }
};

/// Transform of x -> e^{a x} P(x) exp(-zeta . f(x)) where P is f^target or
/// 1 when target is empty. Built piecewise between strikes.
DampedTransform payoff_transform(const std::vector<PayoffDescriptor>& payoffs,
                                 const std::vector<double>& zeta, double damping,
                                 std::optional<std::size_t> target);

/// Closed-form transforms for a stock plus N calls, every security with
/// weight gamma. G: stock numerator (damping alpha), H: normalizer (damping
/// beta), Gk: numerator of the k-th call, k = 1..N, damping 0.
enum class MultiOptionKind { G, H, Gk };

DampedTransform transform_multi_option(double gamma, const std::vector<double>& strikes,
                                       MultiOptionKind kind, double damping, std::size_t k = 0);

/// Transform of x -> e^{-gamma_tilde x} (x - K)^+.
DampedTransform zero_supply_call_transform(double gamma_tilde, double strike);

struct PriceResult {
  std::vector<double> prices;
  std::vector<double> abs_error;
  double normalizer = 0.0;  // E[exp(-tilde_gamma . f(X_T)) | F_t]
};

PriceResult price_ratio(const AffineModel& model, const PricingProblem& pb, const DampingPlan& d,
                        const QuadratureConfig& quad, double t, std::span<const double> state);
PriceResult price_ratio(const AffineModel& model, const MarketSpec& m, const DampingPlan& d,
                        const QuadratureConfig& quad, double t, std::span<const double> state);

/// Price of the single linear security in non-zero adjusted supply, from the
/// u_x-derivative of the exponents at u = (0, -gamma_tilde).
double price_linear_special(const AffineModel& model, double gamma_tilde, double T, double t,
                            std::span<const double> state);

/// Call in zero adjusted supply when the linear security carries weight
/// gamma_tilde.
double price_zero_supply_option(const AffineModel& model, double gamma_tilde, double strike,
                                double T, const QuadratureConfig& quad, double t,
                                std::span<const double> state);

/// -dH/dzeta^k / H at zeta = tilde_gamma by central differences.
double price_gradient_form(const AffineModel& model, const PricingProblem& pb,
                           const DampingPlan& d, const QuadratureConfig& quad, double t,
                           std::span<const double> state, std::size_t k);

/// H(zeta) for the normalizer damping beta.
double normalizer_H(const AffineModel& model, const PricingProblem& pb, double beta,
                    const std::vector<double>& zeta, const QuadratureConfig& quad, double t,
                    std::span<const double> state);

}  // namespace eqcapm

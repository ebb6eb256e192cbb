#pragma once

// Implied-volatility smiles of equilibrium call prices.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqcapm/affine_core.hpp"
#include "eqcapm/quadrature.hpp"

namespace eqcapm {

/// Lognormal: Black formula with zero rate. Normal: Bachelier, which suits
/// the additive underlying.
enum class VolConvention { Lognormal, Normal };

double reference_call(double spot, double strike, double tau, double vol,
                      VolConvention conv = VolConvention::Lognormal);

struct ImpliedVol {
  double vol = 0.0;
  bool invertible = false;  // false: price outside [intrinsic, upper envelope)
  double residual = 0.0;
};

/// Bisection on [1e-6, 5] (lognormal) or [1e-6, 5 * spot] (normal).
ImpliedVol implied_vol(double spot, double strike, double tau, double call_price,
                       VolConvention conv = VolConvention::Lognormal);

struct SmilePoint {
  double strike = 0.0;
  double call_price = 0.0;
  std::optional<double> implied_vol;  // empty: not invertible or pricing failed
  std::string error;
};

struct Smile {
  double sweep_value = 0.0;
  double spot = 0.0;  // equilibrium stock price S_t
  std::vector<SmilePoint> points;
};

/// One smile configuration: stock plus calls, all with adjusted risk
/// aversion gamma.
struct SmileSetup {
  std::shared_ptr<const AffineModel> model;
  double gamma = 0.2;
  double T = 1.0;
  double t = 0.0;
  std::vector<double> state;  // empty: model initial state
  std::vector<double> strikes;
  QuadratureConfig quad;
  VolConvention convention = VolConvention::Lognormal;
};

Smile smile(const SmileSetup& setup, double sweep_value = 0.0);

/// One smile per sweep value; a failing value yields points carrying the error.
std::vector<Smile> smile_sweep(const std::function<SmileSetup(double)>& make,
                               std::span<const double> sweep_values);

/// n equally spaced strikes on [center - 2 sd, center + 2 sd].
std::vector<double> default_strike_grid(double center, double sd, std::size_t n = 15);

/// Mean and standard deviation of X_T under P from the cumulants of the
/// model transform.
struct TerminalMoments {
  double mean = 0.0;
  double sd = 0.0;
};
TerminalMoments terminal_moments(const AffineModel& model, double T, double t,
                                 std::span<const double> state);

/// Implied vol of `s` at moneyness K / spot by linear interpolation between
/// invertible points; NaN outside their range.
double vol_at_moneyness(const Smile& s, double moneyness);

/// True if a's implied vol exceeds b's at every point of a's grid with
/// moneyness in [lo, hi] that b's smile also covers. Smiles are compared in
/// moneyness because each one has its own equilibrium spot. `compared`
/// counts the points checked; zero points means false.
bool dominates(const Smile& a, const Smile& b, double lo, double hi, int* compared = nullptr);

}  // namespace eqcapm

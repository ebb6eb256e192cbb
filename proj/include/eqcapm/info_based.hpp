#pragma once

// Information-based equilibrium: factors X_i are revealed through
// xi_t = sigma_i X_i t + beta_t with independent Brownian bridges beta on [0, T].

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace eqcapm::info {

struct DiscretePrior {
  std::vector<double> points;
  std::vector<double> probs;
};

/// Density (1/kappa) exp(-x/kappa) on x >= 0.
struct ExponentialPrior {
  double kappa = 1.0;
};

/// Density tabulated on increasing abscissae. A bounded side means the
/// support genuinely ends there, so the coverage check is skipped on it.
struct GridPrior {
  std::vector<double> x;
  std::vector<double> density;
  bool bounded_below = false;
  bool bounded_above = false;
};

using Prior = std::variant<DiscretePrior, ExponentialPrior, GridPrior>;

struct InfoFactor {
  Prior prior;
  double sigma = 1.0;
};

/// f^k(x_1..x_N). `linear_factor` marks f^k(x) = x_j, which lets the pricing
/// integral factorize.
struct InfoPayoff {
  std::optional<std::size_t> linear_factor;
  std::function<double(std::span<const double>)> fn;

  static InfoPayoff linear(std::size_t j);
  double operator()(std::span<const double> x) const;
};

struct InfoModelSpec {
  double T = 1.0;
  std::vector<InfoFactor> factors;
  std::vector<InfoPayoff> payoffs;
  std::vector<double> tilde_gamma;

  void validate() const;
  /// One factor, payoff X, weight gamma_tilde.
  static InfoModelSpec single(Prior prior, double sigma, double T, double gamma_tilde);
};

struct InfoPathState {
  double t = 0.0;
  std::vector<double> xi;
};

/// Posterior of one factor: probabilities on `x` (discrete) or density values
/// on the grid `x` (trapezoid-normalized).
struct ConditionalDensity {
  std::vector<double> x;
  std::vector<double> weights;
  bool discrete = true;

  double integrate(const std::function<double(double)>& g) const;
  double mass() const { return integrate([](double) { return 1.0; }); }
};

ConditionalDensity conditional_density(const InfoModelSpec& spec, std::size_t i,
                                       const InfoPathState& state);

/// Grid representation of a prior; exponential priors are tabulated on
/// [0, upper] with n points.
GridPrior tabulate_exponential(double kappa, double upper, std::size_t n);

std::vector<double> price(const InfoModelSpec& spec, const InfoPathState& state);

double binary_bond_price(const InfoModelSpec& spec, const InfoPathState& state);

/// Closed form for a single exponential factor, 0 < t < T.
double exponential_price(const InfoModelSpec& spec, const InfoPathState& state);

/// Prior tilted by exp(-gamma_tilde x), normalized.
Prior tilted_density(const Prior& prior, double gamma_tilde);

struct InnovationStep {
  double t = 0.0;
  double dt = 0.0;
  double dW = 0.0;
  double var_q = 0.0;
  double price = 0.0;        // S_t
  double filter_mean = 0.0;  // E[X | F_t] under P
};

std::vector<InnovationStep> innovation_and_variance(const InfoModelSpec& spec,
                                                    std::span<const InfoPathState> path);

/// Exact bridge sampling of the information processes given the factor
/// values; `stream` selects an independent random stream for the same seed.
std::vector<InfoPathState> simulate_information_paths(const InfoModelSpec& spec,
                                                      std::span<const double> true_factors,
                                                      std::span<const double> time_grid,
                                                      std::uint64_t seed,
                                                      std::uint64_t stream = 0);

/// Draw a factor value from a prior.
template <class Rng>
double sample_prior(const Prior& prior, Rng& rng);

// Moments of a single linear factor under P (gamma = 0) or Q.
struct FactorMoments {
  double mean = 0.0;
  double variance = 0.0;
};
FactorMoments posterior_moments(const InfoModelSpec& spec, const InfoPathState& state,
                                double gamma);

double normal_cdf(double x);
/// phi(z) / Phi(z), accurate far into the left tail.
double inverse_mills(double z);

}  // namespace eqcapm::info

#include "eqcapm/info_based_impl.hpp"

#pragma once

// Brute-force Monte Carlo oracle: terminal samples of the factor models and
// ratio-of-means estimates E[f e^{-g.f}] / E[e^{-g.f}].

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eqcapm/equilibrium.hpp"
#include "eqcapm/heston.hpp"
#include "eqcapm/info_based.hpp"
#include "eqcapm/oujump.hpp"

namespace eqcapm::mc {

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double max_weight_share = 0.0;
  /// Largest single weight is >= 1% of the total: the estimate is dominated
  /// by a few paths (EffectiveSampleTooSmall).
  bool weight_concentrated = false;
};

inline constexpr double kMaxWeightShare = 0.01;

/// Paths are split into fixed-size blocks, each with its own seed derived
/// from (seed, block), so results do not depend on the thread count.
inline constexpr std::size_t kBlockSize = 1 << 14;

struct HestonSamples {
  std::vector<double> V;
  std::vector<double> X;
  std::vector<double> integrated_variance;
};

/// Full-truncation Euler for V; X_T drawn exactly given the V path.
HestonSamples simulate_heston(const heston::HestonParams& p, double T, std::size_t n_paths,
                              std::size_t n_steps, std::uint64_t seed, unsigned threads = 0);

struct OUSamples {
  std::vector<double> X;
  std::vector<std::uint32_t> jumps;
};

/// Exact event-driven simulation of the jump OU factor.
OUSamples simulate_oujump(const oujump::OUJumpParams& p, double T, std::size_t n_paths,
                          std::uint64_t seed, unsigned threads = 0);

/// Ratio of means sum f w / sum w with w = exp(log_w), delta-method error.
OracleEstimate ratio_estimate(std::span<const double> f, std::span<const double> log_w);

/// Price of security k given terminal factor samples.
OracleEstimate ratio_estimate(std::span<const double> samples,
                              const std::vector<PayoffDescriptor>& payoffs,
                              const std::vector<double>& tilde_gamma, std::size_t k);

/// Stock price under Heston, with the step-halving bias monitor.
struct HestonOracle {
  OracleEstimate estimate;
  OracleEstimate halved;  // same seed, 2 n_steps
  bool bias_ok = false;   // |estimate - halved| < estimate.std_error
};
HestonOracle heston_stock_oracle(const heston::HestonParams& p, double gamma, double T,
                                 std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                                 bool step_check = true);

OracleEstimate oujump_stock_oracle(const oujump::OUJumpParams& p, double gamma_tilde, double T,
                                   std::size_t n_paths, std::uint64_t seed);

/// Draws from the time-t posterior of each factor and estimates every price.
std::vector<OracleEstimate> info_oracle(const info::InfoModelSpec& spec,
                                        const info::InfoPathState& state, std::size_t n_paths,
                                        std::uint64_t seed);

/// Nested estimate of E_Q[S_{t+h} | F_t] - S_t for a single linear factor:
/// X from the posterior, xi_{t+h} from the bridge given X, S_{t+h} exact.
OracleEstimate info_martingale_gap(const info::InfoModelSpec& spec,
                                   const info::InfoPathState& state, double h,
                                   std::size_t n_paths, std::uint64_t seed);

/// Runs body(begin, end, block) over blocks of kBlockSize paths on up to
/// `threads` workers (0: hardware concurrency).
void for_each_block(std::size_t n_paths, unsigned threads,
                    const std::function<void(std::size_t begin, std::size_t end,
                                             std::size_t block)>& body);

}  // namespace eqcapm::mc

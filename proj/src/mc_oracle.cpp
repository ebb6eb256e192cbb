#include "eqcapm/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "eqcapm/error.hpp"

namespace eqcapm::mc {

namespace {

enum StreamTag : std::uint32_t { kHeston = 1, kOU = 2, kInfo = 3, kGap = 4 };

std::mt19937_64 block_rng(std::uint64_t seed, std::size_t block, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

std::vector<double> log_weights(std::span<const double> x,
                                const std::vector<PayoffDescriptor>& payoffs,
                                const std::vector<double>& tilde_gamma) {
  std::vector<double> lw(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = 0.0;
    for (std::size_t l = 0; l < payoffs.size(); ++l) {
      e -= tilde_gamma[l] * evaluate_payoff(payoffs[l], x[i]);
    }
    lw[i] = e;
  }
  return lw;
}

}  // namespace

void for_each_block(std::size_t n_paths, unsigned threads,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(blocks, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks || failed) return;
      try {
        body(b * kBlockSize, std::min(n_paths, (b + 1) * kBlockSize), b);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
}

HestonSamples simulate_heston(const heston::HestonParams& p, double T, std::size_t n_paths,
                              std::size_t n_steps, std::uint64_t seed, unsigned threads) {
  p.validate();
  require(T > 0.0 && n_paths > 0, ErrorKind::InvalidArgument, "simulate_heston: need T > 0, paths");
  require(static_cast<double>(n_steps) >= std::ceil(100.0 * T), ErrorKind::InvalidArgument,
          "simulate_heston: need at least 100 steps per unit time");
  HestonSamples out;
  out.V.resize(n_paths);
  out.X.resize(n_paths);
  out.integrated_variance.resize(n_paths);
  const double dt = T / static_cast<double>(n_steps);
  const double sdt = std::sqrt(dt);
  for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end, std::size_t block) {
    std::mt19937_64 rng = block_rng(seed, block, kHeston);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = begin; i < end; ++i) {
      double v = p.v0;
      double iv = 0.0;
      for (std::size_t s = 0; s < n_steps; ++s) {
        const double vp = std::max(v, 0.0);
        const double v_next =
            v + (p.kappa - p.lambda * vp) * dt + p.sigma * std::sqrt(vp) * sdt * normal(rng);
        iv += 0.5 * (vp + std::max(v_next, 0.0)) * dt;
        v = v_next;
      }
      out.V[i] = std::max(v, 0.0);
      out.integrated_variance[i] = iv;
      out.X[i] = p.x0 + p.mu * T + std::sqrt(iv) * normal(rng);
    }
  });
  return out;
}

OUSamples simulate_oujump(const oujump::OUJumpParams& p, double T, std::size_t n_paths,
                          std::uint64_t seed, unsigned threads) {
  p.validate();
  require(T > 0.0 && n_paths > 0, ErrorKind::InvalidArgument, "simulate_oujump: need T > 0, paths");
  OUSamples out;
  out.X.resize(n_paths);
  out.jumps.resize(n_paths);
  for_each_block(n_paths, threads, [&](std::size_t begin, std::size_t end, std::size_t block) {
    std::mt19937_64 rng = block_rng(seed, block, kOU);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = begin; i < end; ++i) {
      double t = 0.0;
      double x = p.x0;
      std::uint32_t n = 0;
      for (;;) {
        const double wait = p.kappa > 0.0 ? -std::log1p(-unif(rng)) / p.kappa
                                          : std::numeric_limits<double>::infinity();
        const double step = std::min(wait, T - t);
        x = p.mu + (x - p.mu) * std::exp(-p.lambda * step);
        if (t + wait >= T) break;
        t += wait;
        const double size = -std::log1p(-unif(rng)) / p.theta;
        x += unif(rng) < 0.5 ? -size : size;
        ++n;
      }
      out.X[i] = x;
      out.jumps[i] = n;
    }
  });
  return out;
}

OracleEstimate ratio_estimate(std::span<const double> f, std::span<const double> log_w) {
  require(f.size() == log_w.size() && f.size() >= 2, ErrorKind::InvalidArgument,
          "ratio_estimate: need at least two samples with weights");
  const std::size_t n = f.size();
  const double top = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> w(n);
  double sw = 0.0;
  double sfw = 0.0;
  double wmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(log_w[i] - top);
    sw += w[i];
    sfw += f[i] * w[i];
    wmax = std::max(wmax, w[i]);
  }
  OracleEstimate e;
  e.n_paths = n;
  e.value = sfw / sw;
  const double wbar = sw / static_cast<double>(n);
  // Delta method: Var(R) ~ Var(f w - R w) / (n wbar^2).
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (f[i] - e.value) * w[i];
    ss += r * r;
  }
  const double var = ss / static_cast<double>(n - 1);
  e.std_error = std::sqrt(var / static_cast<double>(n)) / wbar;
  e.max_weight_share = wmax / sw;
  e.weight_concentrated = e.max_weight_share >= kMaxWeightShare;
  return e;
}

OracleEstimate ratio_estimate(std::span<const double> samples,
                              const std::vector<PayoffDescriptor>& payoffs,
                              const std::vector<double>& tilde_gamma, std::size_t k) {
  require(payoffs.size() == tilde_gamma.size() && k < payoffs.size(), ErrorKind::InvalidArgument,
          "ratio_estimate: payoff/weight mismatch");
  std::vector<double> f(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) f[i] = evaluate_payoff(payoffs[k], samples[i]);
  return ratio_estimate(f, log_weights(samples, payoffs, tilde_gamma));
}

HestonOracle heston_stock_oracle(const heston::HestonParams& p, double gamma, double T,
                                 std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                                 bool step_check) {
  const std::vector<PayoffDescriptor> pay{LinearPayoff{}};
  const std::vector<double> g{gamma};
  HestonOracle out;
  out.estimate = ratio_estimate(simulate_heston(p, T, n_paths, n_steps, seed).X, pay, g, 0);
  if (step_check) {
    out.halved = ratio_estimate(simulate_heston(p, T, n_paths, 2 * n_steps, seed).X, pay, g, 0);
    out.bias_ok = std::abs(out.estimate.value - out.halved.value) < out.estimate.std_error;
  } else {
    out.halved = out.estimate;
    out.bias_ok = true;
  }
  return out;
}

OracleEstimate oujump_stock_oracle(const oujump::OUJumpParams& p, double gamma_tilde, double T,
                                   std::size_t n_paths, std::uint64_t seed) {
  return ratio_estimate(simulate_oujump(p, T, n_paths, seed).X, {LinearPayoff{}}, {gamma_tilde},
                        0);
}

namespace {

// Copied per block: the standard distributions keep mutable state.
struct PosteriorSampler {
  std::vector<double> x;
  std::discrete_distribution<std::size_t> discrete;
  std::piecewise_linear_distribution<double> continuous;
  bool is_discrete = true;

  template <class Rng>
  double operator()(Rng& rng) {
    return is_discrete ? x[discrete(rng)] : continuous(rng);
  }
};

std::vector<PosteriorSampler> posterior_samplers(const info::InfoModelSpec& spec,
                                                 const info::InfoPathState& state) {
  std::vector<PosteriorSampler> out;
  for (std::size_t i = 0; i < spec.factors.size(); ++i) {
    const info::ConditionalDensity d = info::conditional_density(spec, i, state);
    PosteriorSampler s;
    s.x = d.x;
    s.is_discrete = d.discrete;
    if (d.discrete) {
      s.discrete = std::discrete_distribution<std::size_t>(d.weights.begin(), d.weights.end());
    } else {
      s.continuous =
          std::piecewise_linear_distribution<double>(d.x.begin(), d.x.end(), d.weights.begin());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<OracleEstimate> info_oracle(const info::InfoModelSpec& spec,
                                        const info::InfoPathState& state, std::size_t n_paths,
                                        std::uint64_t seed) {
  spec.validate();
  const std::vector<PosteriorSampler> samplers = posterior_samplers(spec, state);
  const std::size_t N = spec.factors.size();
  const std::size_t K = spec.payoffs.size();
  std::vector<std::vector<double>> f(K, std::vector<double>(n_paths));
  std::vector<double> lw(n_paths);
  for_each_block(n_paths, 0, [&](std::size_t begin, std::size_t end, std::size_t block) {
    std::mt19937_64 rng = block_rng(seed, block, kInfo);
    std::vector<PosteriorSampler> local = samplers;
    std::vector<double> x(N);
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t i = 0; i < N; ++i) x[i] = local[i](rng);
      double e = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        f[k][p] = spec.payoffs[k](x);
        e -= spec.tilde_gamma[k] * f[k][p];
      }
      lw[p] = e;
    }
  });
  std::vector<OracleEstimate> out;
  for (std::size_t k = 0; k < K; ++k) out.push_back(ratio_estimate(f[k], lw));
  return out;
}

OracleEstimate info_martingale_gap(const info::InfoModelSpec& spec,
                                   const info::InfoPathState& state, double h,
                                   std::size_t n_paths, std::uint64_t seed) {
  spec.validate();
  require(spec.factors.size() == 1 && spec.payoffs.size() == 1 &&
              spec.payoffs.front().linear_factor,
          ErrorKind::InvalidArgument, "info_martingale_gap: needs N = K = 1 with payoff X");
  const double T = spec.T;
  const double t = state.t;
  require(h > 0.0 && t + h < T, ErrorKind::InvalidArgument, "info_martingale_gap: need t + h < T");
  const double s_now = info::price(spec, state)[0];
  const PosteriorSampler sampler = posterior_samplers(spec, state).front();
  const double sigma = spec.factors.front().sigma;
  const double g = spec.tilde_gamma.front();
  const bool exponential = std::holds_alternative<info::ExponentialPrior>(spec.factors.front().prior);
  const double mean_factor = (T - t - h) / (T - t);
  const double sd = std::sqrt(h * (T - t - h) / (T - t));

  std::vector<double> f(n_paths);
  std::vector<double> lw(n_paths);
  for_each_block(n_paths, 0, [&](std::size_t begin, std::size_t end, std::size_t block) {
    std::mt19937_64 rng = block_rng(seed, block, kGap);
    std::normal_distribution<double> normal(0.0, 1.0);
    PosteriorSampler local = sampler;
    for (std::size_t p = begin; p < end; ++p) {
      const double x = local(rng);
      const double beta = state.xi[0] - sigma * x * t;
      const double beta_next = beta * mean_factor + sd * normal(rng);
      const info::InfoPathState next{t + h, {sigma * x * (t + h) + beta_next}};
      const double s_next =
          exponential ? info::exponential_price(spec, next) : info::price(spec, next)[0];
      f[p] = s_next - s_now;
      lw[p] = -g * x;
    }
  });
  return ratio_estimate(f, lw);
}

}  // namespace eqcapm::mc

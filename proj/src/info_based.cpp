#include "eqcapm/info_based.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm::info {

namespace {

constexpr double kTimeGuard = 1e-9;
constexpr double kCoverageSd = 8.0;
constexpr std::size_t kExponentialGridPoints = 30001;

double check_time(const InfoModelSpec& spec, double t) {
  require(t >= 0.0, ErrorKind::InvalidArgument, "info: time must be non-negative");
  if (t >= spec.T * (1.0 - kTimeGuard)) {
    std::ostringstream os;
    os << "info: t=" << t << " too close to the horizon T=" << spec.T;
    fail(ErrorKind::DegenerateTime, os.str());
  }
  return spec.T / (spec.T - t);
}

double log_likelihood(double x, double sigma, double xi, double t, double k) {
  return k * (sigma * x * xi - 0.5 * sigma * sigma * x * x * t);
}

std::vector<double> trapezoid_coefficients(const std::vector<double>& x) {
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double h = 0.5 * (x[j + 1] - x[j]);
    c[j] += h;
    c[j + 1] += h;
  }
  return c;
}

// Truncated-at-zero Gaussian exp(B x - A x^2 / 2) on x >= 0.
FactorMoments truncated_gaussian(double A, double B) {
  const double s = 1.0 / std::sqrt(A);
  const double z = B * s;  // m / s with m = B / A
  const double lam = inverse_mills(z);
  FactorMoments out;
  out.mean = B / A + s * lam;
  out.variance = s * s * (1.0 - z * lam - lam * lam);
  return out;
}

FactorMoments exponential_moments(double kappa, double sigma, double T, double t, double xi,
                                  double gamma) {
  const double rate = gamma + 1.0 / kappa;
  if (!(rate > 0.0)) {
    fail(ErrorKind::IntegrabilityViolation,
         "info: exp(-gamma x) not integrable against the exponential prior (need gamma + 1/kappa > 0)");
  }
  if (t == 0.0) return {1.0 / rate, 1.0 / (rate * rate)};
  const double A = sigma * sigma * t * T / (T - t);
  const double B = sigma * T * xi / (T - t) - rate;
  return truncated_gaussian(A, B);
}

const InfoFactor& factor(const InfoModelSpec& spec, std::size_t i) {
  require(i < spec.factors.size(), ErrorKind::InvalidArgument, "info: factor index out of range");
  return spec.factors[i];
}

// Quadrature nodes and weights of the posterior of factor i multiplied by
// exp(-c x), normalized to total mass 1.
struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

Nodes tilted_nodes(const ConditionalDensity& d, double c, bool check_tails, bool lo_bounded,
                   bool hi_bounded) {
  Nodes n;
  n.x = d.x;
  n.w.resize(d.x.size());
  const std::vector<double> coef =
      d.discrete ? std::vector<double>(d.x.size(), 1.0) : trapezoid_coefficients(d.x);
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.x.size(); ++j) {
    if (d.weights[j] > 0.0) shift = std::max(shift, -c * d.x[j] + std::log(d.weights[j]));
  }
  double total = 0.0;
  double peak = 0.0;
  for (std::size_t j = 0; j < d.x.size(); ++j) {
    const double dens =
        d.weights[j] > 0.0 ? std::exp(-c * d.x[j] + std::log(d.weights[j]) - shift) : 0.0;
    peak = std::max(peak, dens);
    n.w[j] = dens * coef[j];
    total += n.w[j];
  }
  if (check_tails && !d.discrete && d.x.size() > 1) {
    const double lo = d.weights.front() > 0.0
                          ? std::exp(-c * d.x.front() + std::log(d.weights.front()) - shift)
                          : 0.0;
    const double hi = d.weights.back() > 0.0
                          ? std::exp(-c * d.x.back() + std::log(d.weights.back()) - shift)
                          : 0.0;
    if ((!lo_bounded && lo > 1e-10 * peak) || (!hi_bounded && hi > 1e-10 * peak)) {
      fail(ErrorKind::IntegrabilityViolation,
           "info: tilted posterior does not decay at the edge of the grid");
    }
  }
  require(total > 0.0 && std::isfinite(total), ErrorKind::IntegrabilityViolation,
          "info: tilted posterior has no finite mass");
  for (double& w : n.w) w /= total;
  return n;
}

struct Bounds {
  bool lo = false;
  bool hi = false;
};

Bounds support_bounds(const Prior& p) {
  if (std::holds_alternative<ExponentialPrior>(p)) return {true, false};
  if (const auto* g = std::get_if<GridPrior>(&p)) return {g->bounded_below, g->bounded_above};
  return {true, true};
}

}  // namespace

InfoPayoff InfoPayoff::linear(std::size_t j) {
  InfoPayoff p;
  p.linear_factor = j;
  return p;
}

double InfoPayoff::operator()(std::span<const double> x) const {
  if (linear_factor) return x[*linear_factor];
  return fn(x);
}

void InfoModelSpec::validate() const {
  require(T > 0.0 && std::isfinite(T), ErrorKind::InvalidArgument, "info: horizon must be > 0");
  require(!factors.empty(), ErrorKind::InvalidArgument, "info: at least one factor required");
  require(!payoffs.empty() && payoffs.size() == tilde_gamma.size(), ErrorKind::InvalidArgument,
          "info: one weight per payoff required");
  for (const InfoFactor& f : factors) {
    require(f.sigma > 0.0, ErrorKind::InvalidArgument, "info: information rate must be > 0");
    if (const auto* d = std::get_if<DiscretePrior>(&f.prior)) {
      require(!d->points.empty() && d->points.size() == d->probs.size(), ErrorKind::InvalidArgument,
              "info: discrete prior needs matching points and probabilities");
      double s = 0.0;
      for (double p : d->probs) {
        require(p >= 0.0, ErrorKind::InvalidArgument, "info: negative probability");
        s += p;
      }
      require(std::abs(s - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
              "info: discrete probabilities must sum to 1");
    } else if (const auto* e = std::get_if<ExponentialPrior>(&f.prior)) {
      require(e->kappa > 0.0, ErrorKind::InvalidArgument, "info: exponential kappa must be > 0");
    } else {
      const auto& g = std::get<GridPrior>(f.prior);
      require(g.x.size() >= 2 && g.x.size() == g.density.size(), ErrorKind::InvalidArgument,
              "info: grid prior needs matching abscissae and density values");
      for (std::size_t j = 1; j < g.x.size(); ++j) {
        require(g.x[j] > g.x[j - 1], ErrorKind::InvalidArgument,
                "info: grid abscissae must be increasing");
      }
      const std::vector<double> c = trapezoid_coefficients(g.x);
      double mass = 0.0;
      for (std::size_t j = 0; j < g.x.size(); ++j) {
        require(g.density[j] >= 0.0, ErrorKind::InvalidArgument, "info: negative density value");
        mass += c[j] * g.density[j];
      }
      require(std::abs(mass - 1.0) <= 1e-8, ErrorKind::InvalidArgument,
              "info: grid density must integrate to 1 within 1e-8");
    }
  }
  for (const InfoPayoff& p : payoffs) {
    require(p.linear_factor ? *p.linear_factor < factors.size() : static_cast<bool>(p.fn),
            ErrorKind::InvalidArgument, "info: payoff must be linear in a factor or a function");
  }
}

InfoModelSpec InfoModelSpec::single(Prior prior, double sigma, double T, double gamma_tilde) {
  InfoModelSpec s;
  s.T = T;
  s.factors.push_back({std::move(prior), sigma});
  s.payoffs.push_back(InfoPayoff::linear(0));
  s.tilde_gamma.push_back(gamma_tilde);
  return s;
}

double ConditionalDensity::integrate(const std::function<double(double)>& g) const {
  double acc = 0.0;
  if (discrete) {
    for (std::size_t j = 0; j < x.size(); ++j) acc += weights[j] * g(x[j]);
    return acc;
  }
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    acc += 0.5 * (x[j + 1] - x[j]) * (weights[j] * g(x[j]) + weights[j + 1] * g(x[j + 1]));
  }
  return acc;
}

GridPrior tabulate_exponential(double kappa, double upper, std::size_t n) {
  require(kappa > 0.0 && upper > 0.0 && n >= 3, ErrorKind::InvalidArgument,
          "tabulate_exponential: bad arguments");
  GridPrior g;
  g.bounded_below = true;
  g.x.resize(n);
  g.density.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.x[j] = upper * static_cast<double>(j) / static_cast<double>(n - 1);
    g.density[j] = std::exp(-g.x[j] / kappa) / kappa;
  }
  // Renormalize so the tabulated density integrates to 1 under trapezoid.
  const std::vector<double> c = trapezoid_coefficients(g.x);
  double mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) mass += c[j] * g.density[j];
  for (double& d : g.density) d /= mass;
  return g;
}

ConditionalDensity conditional_density(const InfoModelSpec& spec, std::size_t i,
                                       const InfoPathState& state) {
  spec.validate();
  require(state.xi.size() == spec.factors.size(), ErrorKind::InvalidArgument,
          "info: state dimension mismatch");
  const double k = check_time(spec, state.t);
  const InfoFactor& f = factor(spec, i);
  const double xi = state.xi[i];
  const double t = state.t;

  ConditionalDensity out;
  if (const auto* d = std::get_if<DiscretePrior>(&f.prior)) {
    out.discrete = true;
    out.x = d->points;
    std::vector<double> lw(d->points.size(), -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d->points.size(); ++j) {
      if (d->probs[j] > 0.0) {
        lw[j] = std::log(d->probs[j]) + log_likelihood(d->points[j], f.sigma, xi, t, k);
        top = std::max(top, lw[j]);
      }
    }
    double total = 0.0;
    out.weights.resize(lw.size());
    for (std::size_t j = 0; j < lw.size(); ++j) {
      out.weights[j] = std::isfinite(lw[j]) ? std::exp(lw[j] - top) : 0.0;
      total += out.weights[j];
    }
    for (double& w : out.weights) w /= total;
    return out;
  }

  GridPrior grid;
  if (const auto* e = std::get_if<ExponentialPrior>(&f.prior)) {
    // Cover the posterior and its tilts generously.
    double upper = 0.0;
    for (double g : {0.0, spec.tilde_gamma.front()}) {
      if (g + 1.0 / e->kappa <= 0.0) continue;
      const FactorMoments m = exponential_moments(e->kappa, f.sigma, spec.T, t, xi, g);
      upper = std::max(upper, m.mean + 30.0 * std::sqrt(m.variance));
    }
    grid = tabulate_exponential(e->kappa, std::max(upper, 1e-6), kExponentialGridPoints);
  } else {
    grid = std::get<GridPrior>(f.prior);
  }

  out.discrete = false;
  out.x = grid.x;
  out.weights.resize(grid.x.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    if (grid.density[j] > 0.0) {
      top = std::max(top, std::log(grid.density[j]) + log_likelihood(grid.x[j], f.sigma, xi, t, k));
    }
  }
  for (std::size_t j = 0; j < grid.x.size(); ++j) {
    out.weights[j] =
        grid.density[j] > 0.0
            ? std::exp(std::log(grid.density[j]) + log_likelihood(grid.x[j], f.sigma, xi, t, k) - top)
            : 0.0;
  }
  const double mass = out.mass();
  require(mass > 0.0 && std::isfinite(mass), ErrorKind::IntegrabilityViolation,
          "info: posterior has no finite mass on the grid");
  for (double& w : out.weights) w /= mass;

  const double mean = out.integrate([](double x) { return x; });
  const double var = std::max(0.0, out.integrate([&](double x) { return (x - mean) * (x - mean); }));
  const double sd = std::sqrt(var);
  if ((!grid.bounded_below && grid.x.front() > mean - kCoverageSd * sd) ||
      (!grid.bounded_above && grid.x.back() < mean + kCoverageSd * sd)) {
    std::ostringstream os;
    os << "info: grid [" << grid.x.front() << ", " << grid.x.back()
       << "] does not cover the posterior mean +- 8 sd (" << mean << " +- " << sd << ")";
    fail(ErrorKind::InvalidGrid, os.str());
  }
  return out;
}

std::vector<double> price(const InfoModelSpec& spec, const InfoPathState& state) {
  spec.validate();
  check_time(spec, state.t);
  const std::size_t N = spec.factors.size();
  const std::size_t K = spec.payoffs.size();

  for (std::size_t i = 0; i < N; ++i) {
    if (const auto* e = std::get_if<ExponentialPrior>(&spec.factors[i].prior)) {
      double c = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        if (spec.payoffs[k].linear_factor == i) c += spec.tilde_gamma[k];
      }
      if (!(c + 1.0 / e->kappa > 0.0)) {
        fail(ErrorKind::IntegrabilityViolation,
             "info: exp(-gamma x) not integrable against the exponential prior");
      }
    }
  }

  std::vector<ConditionalDensity> post;
  for (std::size_t i = 0; i < N; ++i) post.push_back(conditional_density(spec, i, state));

  const bool all_linear = std::all_of(spec.payoffs.begin(), spec.payoffs.end(),
                                      [](const InfoPayoff& p) { return p.linear_factor.has_value(); });
  std::vector<double> out(K, 0.0);
  if (all_linear) {
    for (std::size_t i = 0; i < N; ++i) {
      double c = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        if (*spec.payoffs[k].linear_factor == i) c += spec.tilde_gamma[k];
      }
      const Bounds b = support_bounds(spec.factors[i].prior);
      const Nodes n = tilted_nodes(post[i], c, true, b.lo, b.hi);
      double mean = 0.0;
      for (std::size_t j = 0; j < n.x.size(); ++j) mean += n.w[j] * n.x[j];
      for (std::size_t k = 0; k < K; ++k) {
        if (*spec.payoffs[k].linear_factor == i) out[k] = mean;
      }
    }
    return out;
  }

  require(N <= 3, ErrorKind::InvalidArgument,
          "info: non-linear payoffs are supported for at most 3 factors");
  std::vector<Nodes> nodes;
  for (std::size_t i = 0; i < N; ++i) {
    const Bounds b = support_bounds(spec.factors[i].prior);
    nodes.push_back(tilted_nodes(post[i], 0.0, false, b.lo, b.hi));
  }
  std::vector<std::size_t> idx(N, 0);
  std::vector<double> x(N);
  std::vector<double> logz;
  std::vector<double> base;
  std::vector<std::vector<double>> f;
  for (;;) {
    double w = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] = nodes[i].x[idx[i]];
      w *= nodes[i].w[idx[i]];
    }
    if (w > 0.0) {
      std::vector<double> fk(K);
      double e = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        fk[k] = spec.payoffs[k](x);
        e -= spec.tilde_gamma[k] * fk[k];
      }
      logz.push_back(e + std::log(w));
      f.push_back(std::move(fk));
    }
    std::size_t i = 0;
    while (i < N && ++idx[i] == nodes[i].x.size()) idx[i++] = 0;
    if (i == N) break;
  }
  const double top = *std::max_element(logz.begin(), logz.end());
  double den = 0.0;
  for (std::size_t p = 0; p < logz.size(); ++p) {
    const double z = std::exp(logz[p] - top);
    den += z;
    for (std::size_t k = 0; k < K; ++k) out[k] += z * f[p][k];
  }
  for (double& v : out) v /= den;
  return out;
}

double binary_bond_price(const InfoModelSpec& spec, const InfoPathState& state) {
  spec.validate();
  const auto* d = std::get_if<DiscretePrior>(&spec.factors.front().prior);
  require(spec.factors.size() == 1 && spec.payoffs.size() == 1 && d && d->points.size() == 2 &&
              spec.payoffs.front().linear_factor,
          ErrorKind::InvalidArgument, "binary_bond_price: needs one two-point factor paying X");
  require(state.xi.size() == 1, ErrorKind::InvalidArgument, "binary_bond_price: state mismatch");
  const double k = check_time(spec, state.t);
  const double g = spec.tilde_gamma.front();
  const double sigma = spec.factors.front().sigma;
  double lw[2];
  for (int i = 0; i < 2; ++i) {
    lw[i] = d->probs[i] > 0.0
                ? std::log(d->probs[i]) - g * d->points[i] +
                      log_likelihood(d->points[i], sigma, state.xi[0], state.t, k)
                : -std::numeric_limits<double>::infinity();
  }
  const double top = std::max(lw[0], lw[1]);
  const double w0 = std::exp(lw[0] - top);
  const double w1 = std::exp(lw[1] - top);
  return (d->points[0] * w0 + d->points[1] * w1) / (w0 + w1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_mills(double z) {
  if (z > -5.0) {
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return pdf / normal_cdf(z);
  }
  // phi(z)/Phi(z) = 1/R(-z), R the Mills ratio, by its continued fraction.
  const double x = -z;
  double t = x;
  for (int n = 200; n >= 1; --n) t = x + n / t;
  return t;
}

double exponential_price(const InfoModelSpec& spec, const InfoPathState& state) {
  spec.validate();
  const auto* e = std::get_if<ExponentialPrior>(&spec.factors.front().prior);
  require(spec.factors.size() == 1 && spec.payoffs.size() == 1 && e &&
              spec.payoffs.front().linear_factor,
          ErrorKind::InvalidArgument, "exponential_price: needs one exponential factor paying X");
  require(state.xi.size() == 1, ErrorKind::InvalidArgument, "exponential_price: state mismatch");
  if (state.t == 0.0) {
    fail(ErrorKind::DegenerateTime,
         "exponential_price: A_t vanishes at t = 0; the price there is kappa / (gamma kappa + 1)");
  }
  check_time(spec, state.t);
  const double kappa = e->kappa;
  const double g = spec.tilde_gamma.front();
  if (!(g + 1.0 / kappa > 0.0)) {
    fail(ErrorKind::IntegrabilityViolation, "exponential_price: need gamma_tilde + 1/kappa > 0");
  }
  const double sigma = spec.factors.front().sigma;
  const double T = spec.T;
  const double t = state.t;
  const double A = sigma * sigma * t * T / (T - t);
  const double B = sigma * T * state.xi[0] / (T - t) - (g * kappa + 1.0) / kappa;
  const double rA = std::sqrt(A);
  return inverse_mills(B / rA) / rA + B / A;
}

Prior tilted_density(const Prior& prior, double gamma_tilde) {
  if (const auto* d = std::get_if<DiscretePrior>(&prior)) {
    DiscretePrior out = *d;
    double top = -std::numeric_limits<double>::infinity();
    for (double x : d->points) top = std::max(top, -gamma_tilde * x);
    double total = 0.0;
    for (std::size_t j = 0; j < out.probs.size(); ++j) {
      out.probs[j] *= std::exp(-gamma_tilde * d->points[j] - top);
      total += out.probs[j];
    }
    for (double& p : out.probs) p /= total;
    return out;
  }
  if (const auto* e = std::get_if<ExponentialPrior>(&prior)) {
    const double rate = gamma_tilde + 1.0 / e->kappa;
    if (!(rate > 0.0)) {
      fail(ErrorKind::IntegrabilityViolation, "tilted_density: need gamma_tilde + 1/kappa > 0");
    }
    return ExponentialPrior{1.0 / rate};
  }
  const auto& g = std::get<GridPrior>(prior);
  ConditionalDensity d;
  d.discrete = false;
  d.x = g.x;
  d.weights = g.density;
  const Nodes n = tilted_nodes(d, gamma_tilde, true, g.bounded_below, g.bounded_above);
  GridPrior out = g;
  const std::vector<double> c = trapezoid_coefficients(g.x);
  for (std::size_t j = 0; j < g.x.size(); ++j) out.density[j] = c[j] > 0.0 ? n.w[j] / c[j] : 0.0;
  return out;
}

FactorMoments posterior_moments(const InfoModelSpec& spec, const InfoPathState& state,
                                double gamma) {
  spec.validate();
  require(spec.factors.size() == 1, ErrorKind::InvalidArgument,
          "posterior_moments: single factor only");
  require(state.xi.size() == 1, ErrorKind::InvalidArgument, "posterior_moments: state mismatch");
  check_time(spec, state.t);
  const InfoFactor& f = spec.factors.front();
  if (const auto* e = std::get_if<ExponentialPrior>(&f.prior)) {
    return exponential_moments(e->kappa, f.sigma, spec.T, state.t, state.xi[0], gamma);
  }
  const ConditionalDensity d = conditional_density(spec, 0, state);
  const Bounds b = support_bounds(f.prior);
  const Nodes n = tilted_nodes(d, gamma, true, b.lo, b.hi);
  FactorMoments m;
  for (std::size_t j = 0; j < n.x.size(); ++j) m.mean += n.w[j] * n.x[j];
  for (std::size_t j = 0; j < n.x.size(); ++j) {
    m.variance += n.w[j] * (n.x[j] - m.mean) * (n.x[j] - m.mean);
  }
  return m;
}

std::vector<InnovationStep> innovation_and_variance(const InfoModelSpec& spec,
                                                    std::span<const InfoPathState> path) {
  spec.validate();
  require(spec.factors.size() == 1 && spec.payoffs.size() == 1 &&
              spec.payoffs.front().linear_factor,
          ErrorKind::InvalidArgument, "innovation_and_variance: needs N = K = 1 with payoff X");
  const double sigma = spec.factors.front().sigma;
  const double g = spec.tilde_gamma.front();
  std::vector<InnovationStep> out;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const InfoPathState& s = path[k];
    check_time(spec, s.t);
    InnovationStep st;
    st.t = s.t;
    st.dt = path[k + 1].t - s.t;
    require(st.dt > 0.0, ErrorKind::InvalidGrid, "innovation_and_variance: times must increase");
    st.filter_mean = posterior_moments(spec, s, 0.0).mean;
    const FactorMoments q = posterior_moments(spec, s, g);
    st.price = q.mean;
    st.var_q = std::max(0.0, q.variance);
    st.dW = (path[k + 1].xi[0] - s.xi[0]) -
            (sigma * spec.T * st.filter_mean - s.xi[0]) / (spec.T - s.t) * st.dt;
    out.push_back(st);
  }
  return out;
}

std::vector<InfoPathState> simulate_information_paths(const InfoModelSpec& spec,
                                                      std::span<const double> true_factors,
                                                      std::span<const double> time_grid,
                                                      std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  const std::size_t N = spec.factors.size();
  require(true_factors.size() == N, ErrorKind::InvalidArgument,
          "simulate_information_paths: one factor value per factor required");
  double prev = 0.0;
  for (double t : time_grid) {
    if (!(t >= prev && t < spec.T)) {
      fail(ErrorKind::InvalidGrid, "simulate_information_paths: grid must be increasing in [0, T)");
    }
    prev = t;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> bridge(N, 0.0);
  double s = 0.0;
  const double T = spec.T;
  std::vector<InfoPathState> out;
  out.reserve(time_grid.size());
  for (double t : time_grid) {
    if (t > s) {
      const double mean_factor = (T - t) / (T - s);
      const double sd = std::sqrt((t - s) * (T - t) / (T - s));
      for (double& b : bridge) b = b * mean_factor + sd * normal(rng);
    }
    s = t;
    InfoPathState st;
    st.t = t;
    st.xi.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      st.xi[i] = spec.factors[i].sigma * true_factors[i] * t + bridge[i];
    }
    out.push_back(std::move(st));
  }
  return out;
}

}  // namespace eqcapm::info

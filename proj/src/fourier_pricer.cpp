#include "eqcapm/fourier_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const cplx kI{0.0, 1.0};

void fit_bound(DampedTransform& tr) {
  tr.z_hat = 1.0;
  double m = std::abs(tr.evaluator(0.0));
  for (int i = 0; i <= 320; ++i) {
    const double s = std::pow(10.0, -2.0 + 8.0 * i / 320.0);
    m = std::max(m, std::abs(tr.evaluator(s)) * (s * s + tr.z_hat));
  }
  tr.m_hat = 1.5 * m;
}

// Affine piece of x -> -zeta . f(x) and of the target payoff on one interval.
struct Piece {
  double lo = -kInf;
  double hi = kInf;
  double slope = 0.0;      // exponent is -slope * x + shift
  double shift = 0.0;
  double m = 0.0;          // target payoff m x + q
  double q = 0.0;
};

bool call_active(const PayoffDescriptor& f, double x, double* strike) {
  if (const auto* c = std::get_if<CallPayoff>(&f)) {
    *strike = c->strike;
    return x > c->strike;
  }
  return false;
}

// int_lo^hi (m x + q) e^{c x + d} dx; infinite ends must be convergent.
cplx piece_integral(const Piece& p, cplx c, double d) {
  auto antideriv = [&](double x) {
    return std::exp(c * x + d) * ((p.m * x + p.q) / c - p.m / (c * c));
  };
  if (std::isfinite(p.lo) && std::isfinite(p.hi) &&
      std::abs(c) * std::max(std::abs(p.lo), std::abs(p.hi)) < 1e-7) {
    auto poly = [&](double x) {
      return std::exp(d) * (p.q * x + 0.5 * (p.m + c * p.q) * x * x + c * p.m * x * x * x / 3.0);
    };
    return poly(p.hi) - poly(p.lo);
  }
  cplx out = 0.0;
  if (std::isfinite(p.hi)) out += antideriv(p.hi);
  if (std::isfinite(p.lo)) out -= antideriv(p.lo);
  return out;
}

struct Dampings {
  std::vector<double> values;
  std::vector<std::size_t> numerator_index;
  std::size_t beta_index = 0;
};

Dampings collect(const DampingPlan& d) {
  Dampings out;
  auto index_of = [&](double a) {
    for (std::size_t j = 0; j < out.values.size(); ++j) {
      if (out.values[j] == a) return j;
    }
    out.values.push_back(a);
    return out.values.size() - 1;
  };
  for (double a : d.alphas) out.numerator_index.push_back(index_of(a));
  out.beta_index = index_of(d.beta);
  return out;
}

void check_domain(const AffineModel& model, double tau, double damping) {
  if (!model.domain_contains_x(tau, -damping)) {
    std::ostringstream os;
    os << "damping " << damping << " outside the analytic domain for horizon " << tau;
    fail(ErrorKind::DomainViolation, os.str());
  }
}

double moment(const AffineModel& model, double tau, double damping,
              std::span<const double> state) {
  return std::exp(model.log_transform_x(tau, cplx(-damping, 0.0), state).real());
}

double tail_limit(const QuadratureConfig& quad, double bound, double scale) {
  if (quad.truncation > 0.0) return quad.truncation;
  const double tol = std::max(quad.abs_tol, quad.rel_tol * std::abs(scale));
  return 10.0 * bound / tol;
}

double require_time(double T, double t) {
  require(t >= 0.0 && t <= T, ErrorKind::InvalidArgument, "pricing: need 0 <= t <= T");
  return T - t;
}

// At tau = 0 the inversion integrals are only conditionally convergent; the
// terminal condition is exact.
PriceResult terminal_prices(const PricingProblem& pb, double x) {
  PriceResult res;
  double expo = 0.0;
  for (std::size_t k = 0; k < pb.payoffs.size(); ++k) {
    const double f = evaluate_payoff(pb.payoffs[k], x);
    res.prices.push_back(f);
    res.abs_error.push_back(0.0);
    expo -= pb.tilde_gamma[k] * f;
  }
  res.normalizer = std::exp(expo);
  return res;
}

}  // namespace

PricingProblem PricingProblem::from_market(const MarketSpec& m) {
  PricingProblem pb;
  pb.payoffs = m.payoffs;
  pb.tilde_gamma = adjusted_risk_aversion(m).tilde_gamma;
  pb.horizon = m.horizon;
  return pb;
}

void PricingProblem::validate() const {
  require(!payoffs.empty(), ErrorKind::InvalidArgument, "pricing: no securities");
  require(tilde_gamma.size() == payoffs.size(), ErrorKind::InvalidArgument,
          "pricing: one weight per security required");
  require(horizon >= 0.0, ErrorKind::InvalidArgument, "pricing: horizon must be >= 0");
}

DampingWindow damping_window(const PricingProblem& pb) {
  pb.validate();
  DampingWindow w;
  for (std::size_t k = 0; k < pb.payoffs.size(); ++k) {
    if (std::holds_alternative<LinearPayoff>(pb.payoffs[k])) w.lower += pb.tilde_gamma[k];
    w.upper += pb.tilde_gamma[k];
  }
  return w;
}

DampingPlan default_damping(const PricingProblem& pb) {
  const DampingWindow w = damping_window(pb);
  if (!(w.lower < w.upper)) {
    fail(ErrorKind::InvalidDamping,
         "no admissible damping: calls carry no positive aggregate weight");
  }
  DampingPlan d;
  d.lower = w.lower;
  d.upper = w.upper;
  d.beta = 0.5 * (w.lower + w.upper);
  for (const PayoffDescriptor& f : pb.payoffs) {
    d.alphas.push_back(std::holds_alternative<LinearPayoff>(f) ? d.beta : 0.0);
  }
  if (w.upper <= 0.0) {
    for (std::size_t k = 0; k < pb.payoffs.size(); ++k) {
      if (std::holds_alternative<CallPayoff>(pb.payoffs[k])) d.alphas[k] = d.beta;
    }
  }
  return d;
}

void validate_damping(const PricingProblem& pb, const DampingPlan& d) {
  const DampingWindow w = damping_window(pb);
  require(d.alphas.size() == pb.payoffs.size(), ErrorKind::InvalidDamping,
          "damping: one alpha per security required");
  auto inside = [&](double a) { return a > w.lower && a < w.upper; };
  if (!inside(d.beta)) {
    std::ostringstream os;
    os << "damping: beta=" << d.beta << " outside (" << w.lower << ", " << w.upper << ")";
    fail(ErrorKind::InvalidDamping, os.str());
  }
  for (std::size_t k = 0; k < pb.payoffs.size(); ++k) {
    const bool linear = std::holds_alternative<LinearPayoff>(pb.payoffs[k]);
    const bool ok = linear ? inside(d.alphas[k]) : d.alphas[k] < w.upper;
    if (!ok) {
      std::ostringstream os;
      os << "damping: alpha[" << k << "]=" << d.alphas[k] << " not admissible";
      fail(ErrorKind::InvalidDamping, os.str());
    }
  }
}

DampedTransform payoff_transform(const std::vector<PayoffDescriptor>& payoffs,
                                 const std::vector<double>& zeta, double damping,
                                 std::optional<std::size_t> target) {
  require(payoffs.size() == zeta.size(), ErrorKind::InvalidArgument,
          "payoff_transform: one weight per payoff required");
  require(!target || *target < payoffs.size(), ErrorKind::InvalidArgument,
          "payoff_transform: target index out of range");
  std::vector<double> cuts;
  for (const PayoffDescriptor& f : payoffs) {
    if (const auto* c = std::get_if<CallPayoff>(&f)) cuts.push_back(c->strike);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Piece> pieces(cuts.size() + 1);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Piece& p = pieces[i];
    if (i > 0) p.lo = cuts[i - 1];
    if (i < cuts.size()) p.hi = cuts[i];
    double x;
    if (cuts.empty()) x = 0.0;
    else if (i == 0) x = cuts.front() - 1.0;
    else if (i == cuts.size()) x = cuts.back() + 1.0;
    else x = 0.5 * (p.lo + p.hi);
    for (std::size_t k = 0; k < payoffs.size(); ++k) {
      double strike = 0.0;
      if (std::holds_alternative<LinearPayoff>(payoffs[k])) {
        p.slope += zeta[k];
      } else if (call_active(payoffs[k], x, &strike)) {
        p.slope += zeta[k];
        p.shift += zeta[k] * strike;
      }
    }
    if (!target) {
      p.q = 1.0;
    } else if (std::holds_alternative<LinearPayoff>(payoffs[*target])) {
      p.m = 1.0;
    } else {
      double strike = 0.0;
      if (call_active(payoffs[*target], x, &strike)) {
        p.m = 1.0;
        p.q = -strike;
      }
    }
  }
  const Piece& left = pieces.front();
  const Piece& right = pieces.back();
  if ((left.m != 0.0 || left.q != 0.0) && !(damping - left.slope > 0.0)) {
    fail(ErrorKind::InvalidDamping, "payoff_transform: damped payoff not integrable at -inf");
  }
  if ((right.m != 0.0 || right.q != 0.0) && !(damping - right.slope < 0.0)) {
    fail(ErrorKind::InvalidDamping, "payoff_transform: damped payoff not integrable at +inf");
  }
  std::erase_if(pieces, [](const Piece& p) { return p.m == 0.0 && p.q == 0.0; });

  DampedTransform tr;
  tr.evaluator = [pieces, damping](double s) {
    cplx acc = 0.0;
    for (const Piece& p : pieces) acc += piece_integral(p, damping - p.slope - kI * s, p.shift);
    return acc;
  };
  fit_bound(tr);
  return tr;
}

DampedTransform transform_multi_option(double gamma, const std::vector<double>& strikes,
                                       MultiOptionKind kind, double damping, std::size_t k) {
  const std::size_t n = strikes.size();
  require(n >= 1, ErrorKind::InvalidArgument, "transform_multi_option: need at least one strike");
  for (std::size_t i = 1; i < n; ++i) {
    require(strikes[i] > strikes[i - 1], ErrorKind::InvalidArgument,
            "transform_multi_option: strikes must be strictly increasing");
  }
  require(gamma > 0.0, ErrorKind::InvalidDamping, "transform_multi_option: gamma must be positive");
  std::vector<double> cum(n + 1, 0.0);  // cum[j] = K_1 + ... + K_j
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + strikes[i];
  const double g = gamma;
  const std::vector<double> K = strikes;

  DampedTransform tr;
  switch (kind) {
    case MultiOptionKind::G:
    case MultiOptionKind::H: {
      if (!(damping > g && damping < (n + 1) * g)) {
        fail(ErrorKind::InvalidDamping, "transform_multi_option: need gamma < damping < (N+1) gamma");
      }
      const bool stock = kind == MultiOptionKind::G;
      tr.evaluator = [=](double s) {
        cplx acc = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
          const double Kj = K[j - 1];
          const cplx a = -kI * s + damping - static_cast<double>(j) * g;
          const cplx b = -kI * s + damping - static_cast<double>(j + 1) * g;
          const cplx e = std::exp(g * cum[j - 1]) * std::exp(a * Kj);
          if (stock) {
            acc += e * ((-Kj * g / (a * b)) + (1.0 / (b * b) - 1.0 / (a * a)));
          } else {
            acc += e * (-g / (a * b));
          }
        }
        return acc;
      };
      break;
    }
    case MultiOptionKind::Gk: {
      require(k >= 1 && k <= n, ErrorKind::InvalidArgument,
              "transform_multi_option: call index must be in 1..N");
      if (damping != 0.0) {
        fail(ErrorKind::InvalidDamping, "transform_multi_option: call numerators use damping 0");
      }
      tr.evaluator = [=](double s) {
        const double Kk = K[k - 1];
        const cplx b0 = -kI * s - static_cast<double>(k + 1) * g;
        cplx acc = std::exp(g * cum[k - 1]) * std::exp((-kI * s - static_cast<double>(k) * g) * Kk) /
                   (b0 * b0);
        for (std::size_t j = k + 1; j <= n; ++j) {
          const double Kj = K[j - 1];
          const cplx a = -kI * s - static_cast<double>(j) * g;
          const cplx b = -kI * s - static_cast<double>(j + 1) * g;
          acc += std::exp(g * cum[j - 1]) * std::exp(a * Kj) *
                 ((-(Kj - Kk) * g / (a * b)) + (1.0 / (b * b) - 1.0 / (a * a)));
        }
        return acc;
      };
      break;
    }
  }
  fit_bound(tr);
  return tr;
}

DampedTransform zero_supply_call_transform(double gamma_tilde, double strike) {
  if (!(gamma_tilde > 0.0)) {
    fail(ErrorKind::InvalidDamping, "zero-supply call transform needs gamma_tilde > 0");
  }
  DampedTransform tr;
  tr.evaluator = [gamma_tilde, strike](double s) {
    const cplx z = kI * s + gamma_tilde;
    return std::exp(-z * strike) / (z * z);
  };
  fit_bound(tr);
  return tr;
}

PriceResult price_ratio(const AffineModel& model, const PricingProblem& pb, const DampingPlan& d,
                        const QuadratureConfig& quad, double t, std::span<const double> state) {
  pb.validate();
  quad.validate();
  require(state.size() == model.dimension(), ErrorKind::InvalidArgument,
          "price_ratio: state dimension mismatch");
  const double tau = require_time(pb.horizon, t);
  validate_damping(pb, d);
  if (tau == 0.0) return terminal_prices(pb, state.back());
  const Dampings damps = collect(d);
  for (double a : damps.values) check_domain(model, tau, a);

  const std::size_t K = pb.payoffs.size();
  std::vector<DampedTransform> tr;
  for (std::size_t k = 0; k < K; ++k) {
    tr.push_back(payoff_transform(pb.payoffs, pb.tilde_gamma, d.alphas[k], k));
  }
  tr.push_back(payoff_transform(pb.payoffs, pb.tilde_gamma, d.beta, std::nullopt));

  std::vector<double> mom(damps.values.size());
  for (std::size_t j = 0; j < mom.size(); ++j) mom[j] = moment(model, tau, damps.values[j], state);
  double bound = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    const std::size_t j = k < K ? damps.numerator_index[k] : damps.beta_index;
    bound = std::max(bound, tr[k].m_hat * mom[j]);
  }
  const double scale = mom[damps.beta_index] * std::abs(tr[K](0.0));

  std::vector<cplx> E(damps.values.size());
  auto integrand = [&](double s, std::span<double> out) {
    for (std::size_t j = 0; j < E.size(); ++j) {
      E[j] = std::exp(model.log_transform_x(tau, cplx(-damps.values[j], s), state));
    }
    for (std::size_t k = 0; k < K; ++k) {
      out[k] = 2.0 * (E[damps.numerator_index[k]] * tr[k](s)).real();
    }
    out[K] = 2.0 * (E[damps.beta_index] * tr[K](s)).real();
  };
  const QuadratureResult q =
      integrate_half_line(integrand, K + 1, quad, tail_limit(quad, bound, scale));

  PriceResult res;
  const double den = q.values[K] / kTwoPi;
  const double den_err = q.abs_error[K] / kTwoPi;
  if (!(den > 0.0)) fail(ErrorKind::PricingError, "price_ratio: normalizer is not positive");
  res.normalizer = den;
  for (std::size_t k = 0; k < K; ++k) {
    const double num = q.values[k] / kTwoPi;
    res.prices.push_back(num / den);
    res.abs_error.push_back(q.abs_error[k] / kTwoPi / den + std::abs(num) * den_err / (den * den));
  }
  return res;
}

PriceResult price_ratio(const AffineModel& model, const MarketSpec& m, const DampingPlan& d,
                        const QuadratureConfig& quad, double t, std::span<const double> state) {
  return price_ratio(model, PricingProblem::from_market(m), d, quad, t, state);
}

double price_linear_special(const AffineModel& model, double gamma_tilde, double T, double t,
                            std::span<const double> state) {
  require(state.size() == model.dimension(), ErrorKind::InvalidArgument,
          "price_linear_special: state dimension mismatch");
  const double tau = require_time(T, t);
  check_domain(model, tau, gamma_tilde);
  if (tau == 0.0) return state.back();
  const double u = -gamma_tilde;
  auto f = [&](double x) { return model.log_transform_x(tau, cplx(x, 0.0), state).real(); };
  auto central = [&](double h) { return (f(u + h) - f(u - h)) / (2.0 * h); };
  const double h = 1e-3 * (1.0 + std::abs(u));
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

double price_zero_supply_option(const AffineModel& model, double gamma_tilde, double strike,
                                double T, const QuadratureConfig& quad, double t,
                                std::span<const double> state) {
  quad.validate();
  require(state.size() == model.dimension(), ErrorKind::InvalidArgument,
          "price_zero_supply_option: state dimension mismatch");
  const double tau = require_time(T, t);
  check_domain(model, tau, gamma_tilde);
  if (tau == 0.0) return std::max(state.back() - strike, 0.0);
  const DampedTransform tr = zero_supply_call_transform(gamma_tilde, strike);
  const cplx base = model.log_transform_x(tau, cplx(-gamma_tilde, 0.0), state);
  auto integrand = [&](double s, std::span<double> out) {
    const cplx shift = model.log_transform_x(tau, cplx(0.0, s), state) - base;
    out[0] = 2.0 * (std::exp(shift) * tr(s)).real();
  };
  const double mom = std::exp(-base.real());
  const double scale = mom * std::abs(tr(0.0));
  const QuadratureResult q =
      integrate_half_line(integrand, 1, quad, tail_limit(quad, tr.m_hat * mom, scale));
  return q.values[0] / kTwoPi;
}

double normalizer_H(const AffineModel& model, const PricingProblem& pb, double beta,
                    const std::vector<double>& zeta, const QuadratureConfig& quad, double t,
                    std::span<const double> state) {
  PricingProblem shifted = pb;
  shifted.tilde_gamma = zeta;
  shifted.validate();
  const double tau = require_time(pb.horizon, t);
  check_domain(model, tau, beta);
  if (tau == 0.0) return terminal_prices(shifted, state.back()).normalizer;
  const DampedTransform tr = payoff_transform(shifted.payoffs, zeta, beta, std::nullopt);
  auto integrand = [&](double s, std::span<double> out) {
    out[0] = 2.0 * (std::exp(model.log_transform_x(tau, cplx(-beta, s), state)) * tr(s)).real();
  };
  const double mom = moment(model, tau, beta, state);
  const QuadratureResult q = integrate_half_line(
      integrand, 1, quad, tail_limit(quad, tr.m_hat * mom, mom * std::abs(tr(0.0))));
  return q.values[0] / kTwoPi;
}

double price_gradient_form(const AffineModel& model, const PricingProblem& pb,
                           const DampingPlan& d, const QuadratureConfig& quad, double t,
                           std::span<const double> state, std::size_t k) {
  pb.validate();
  quad.validate();
  require(k < pb.payoffs.size(), ErrorKind::InvalidArgument,
          "price_gradient_form: security index out of range");
  require(state.size() == model.dimension(), ErrorKind::InvalidArgument,
          "price_gradient_form: state dimension mismatch");
  const double tau = require_time(pb.horizon, t);
  validate_damping(pb, d);
  check_domain(model, tau, d.beta);
  if (tau == 0.0) return evaluate_payoff(pb.payoffs[k], state.back());

  const double h = 1e-5 * (1.0 + std::abs(pb.tilde_gamma[k]));
  std::vector<double> up = pb.tilde_gamma, down = pb.tilde_gamma;
  up[k] += h;
  down[k] -= h;
  const DampedTransform t0 = payoff_transform(pb.payoffs, pb.tilde_gamma, d.beta, std::nullopt);
  const DampedTransform tp = payoff_transform(pb.payoffs, up, d.beta, std::nullopt);
  const DampedTransform tm = payoff_transform(pb.payoffs, down, d.beta, std::nullopt);

  auto integrand = [&](double s, std::span<double> out) {
    const cplx E = std::exp(model.log_transform_x(tau, cplx(-d.beta, s), state));
    out[0] = 2.0 * (E * t0(s)).real();
    out[1] = 2.0 * (E * tp(s)).real();
    out[2] = 2.0 * (E * tm(s)).real();
  };
  const double mom = moment(model, tau, d.beta, state);
  const double bound = mom * std::max({t0.m_hat, tp.m_hat, tm.m_hat});
  const QuadratureResult q = integrate_half_line(integrand, 3, quad,
                                                 tail_limit(quad, bound, mom * std::abs(t0(0.0))));
  const double H0 = q.values[0] / kTwoPi;
  if (!(H0 > 0.0)) fail(ErrorKind::PricingError, "price_gradient_form: H is not positive");
  const double dH = (q.values[1] - q.values[2]) / kTwoPi / (2.0 * h);
  return -dH / H0;
}

}  // namespace eqcapm

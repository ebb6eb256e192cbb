#include "eqcapm/heston.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm::heston {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryRadius = 1e-8;
constexpr double kThetaZero = 1e-6;

cplx principal_sqrt(cplx z) {
  cplx r = std::sqrt(z);
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
  return r;
}

double real_part_checked(cplx z, const char* what) {
  if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z.real()))) {
    std::ostringstream os;
    os << what << ": imaginary residue " << z.imag() << " does not cancel";
    fail(ErrorKind::NonRealResult, os.str());
  }
  return z.real();
}

// log((1 - w0 e^{-th s}) / (1 - w0)) for s in [0, t], continued along s.
cplx continuous_log_ratio(cplx w0, cplx th, double t) {
  auto f = [&](double s) { return 1.0 - w0 * std::exp(-th * s); };
  auto segment = [&](auto&& self, double a, double b, cplx fa, cplx fb, int depth) -> cplx {
    const cplx r = fb / fa;
    if (std::abs(std::arg(r)) > 0.5 && depth < 40) {
      const double m = 0.5 * (a + b);
      const cplx fm = f(m);
      return self(self, a, m, fa, fm, depth + 1) + self(self, m, b, fm, fb, depth + 1);
    }
    return std::log(r);
  };
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(th) * t / 0.25)));
  cplx acc = 0.0;
  cplx prev = f(0.0);
  for (int k = 1; k <= n; ++k) {
    const double a = t * (k - 1) / n;
    const double b = t * k / n;
    const cplx fb = f(b);
    acc += segment(segment, a, b, prev, fb, 0);
    prev = fb;
  }
  return acc;
}

cplx clog1p(cplx z) {
  if (std::abs(z) < 1e-5) return z - 0.5 * z * z + z * z * z / 3.0;
  return std::log(1.0 + z);
}

cplx one_minus_exp_neg(cplx z) {  // 1 - e^{-z}
  if (std::abs(z) < 1e-5) return z - 0.5 * z * z + z * z * z / 6.0;
  return 1.0 - std::exp(-z);
}

}  // namespace

void HestonParams::validate() const {
  require(kappa > 0.0 && lambda > 0.0 && sigma > 0.0, ErrorKind::InvalidArgument,
          "heston: kappa, lambda and sigma must be positive");
  require(v0 >= 0.0, ErrorKind::InvalidArgument, "heston: v0 must be non-negative");
  require(std::isfinite(mu) && std::isfinite(x0) && std::isfinite(v0), ErrorKind::InvalidArgument,
          "heston: parameters must be finite");
}

ThetaValue theta(const HestonParams& p, double gamma) {
  p.validate();
  const double sg = p.sigma * std::abs(gamma);
  if (std::abs(sg - p.lambda) <= kBoundaryRadius * std::max(1.0, p.lambda)) {
    fail(ErrorKind::BoundaryCase, "heston.theta: sigma*|gamma| equals lambda");
  }
  ThetaValue out;
  if (sg < p.lambda) {
    out.value = std::sqrt(p.lambda * p.lambda - sg * sg);
    out.branch = Branch::Real;
  } else {
    out.value = cplx(0.0, std::sqrt(sg * sg - p.lambda * p.lambda));
    out.branch = Branch::Imaginary;
  }
  out.derivative = -p.sigma * p.sigma * gamma / out.value;
  return out;
}

double max_horizon(const HestonParams& p, double gamma) {
  const ThetaValue th = theta(p, gamma);
  if (th.branch == Branch::Real) return kInf;
  const double a = std::abs(th.value);
  return (2.0 / a) * (std::atan(a / -p.lambda) + std::numbers::pi);
}

double explosion_time(const HestonParams& p, double u_v, double u_x) {
  p.validate();
  const double s2 = p.sigma * p.sigma;
  const double d = p.lambda * p.lambda - s2 * u_x * u_x;
  if (std::sqrt(std::abs(d)) < kThetaZero) {
    const double y0 = p.lambda / s2;
    return u_v > y0 ? 2.0 / (s2 * (u_v - y0)) : kInf;
  }
  if (d > 0.0) {
    const double th = std::sqrt(d);
    const double yp = (p.lambda + th) / s2;
    const double ym = (p.lambda - th) / s2;
    if (u_v <= yp) return kInf;
    return std::log((u_v - ym) / (u_v - yp)) / th;
  }
  const double om = std::sqrt(-d);
  const cplx ym = cplx(p.lambda, -om) / s2;
  const cplx yp = cplx(p.lambda, om) / s2;
  double a = std::arg((u_v - ym) / (u_v - yp));
  if (a <= 0.0) a += 2.0 * std::numbers::pi;
  return a / om;
}

ComplexExponents phi_psi(const HestonParams& p, double t, cplx u_x) {
  return phi_psi(p, t, cplx{}, u_x);
}

ComplexExponents phi_psi(const HestonParams& p, double t, cplx u_v, cplx u_x) {
  p.validate();
  require(t >= 0.0 && std::isfinite(t), ErrorKind::InvalidArgument,
          "heston.phi_psi: time must be finite and non-negative");
  ComplexExponents out;
  out.psi = {u_v, u_x};
  if (t == 0.0) return out;

  const double horizon = explosion_time(p, u_v.real(), u_x.real());
  if (t >= horizon) {
    std::ostringstream os;
    os << "heston.phi_psi: t=" << t << " beyond explosion time " << horizon;
    fail(ErrorKind::HorizonExceeded, os.str());
  }

  const double s2 = p.sigma * p.sigma;
  const cplx u2 = u_x * u_x;
  const cplx th = principal_sqrt(p.lambda * p.lambda - s2 * u2);
  cplx psi1;
  cplx int_psi1;

  if (std::abs(th) < kThetaZero) {
    const double y0 = p.lambda / s2;
    const cplx den = 1.0 - 0.5 * s2 * (u_v - y0) * t;
    psi1 = y0 + (u_v - y0) / den;
    int_psi1 = y0 * t - (2.0 / s2) * std::log(den);
  } else {
    const cplx ym = u2 / (p.lambda + th);  // (lambda - th) / sigma^2 without cancellation
    const cplx yp = (p.lambda + th) / s2;
    if (u_v == 0.0) {
      // Trap form: |w0| = |lambda - th| / |lambda + th| <= 1.
      const cplx omq = one_minus_exp_neg(th * t);
      const cplx q = 1.0 - omq;
      const cplx dt = th * (1.0 + q) + p.lambda * omq;
      psi1 = u2 * omq / dt;
      const cplx w0 = ym / yp;
      int_psi1 = ym * t - (2.0 / s2) * clog1p(w0 * omq / (1.0 - w0));
    } else if (std::abs(u_v - yp) <= 1e-14 * (1.0 + std::abs(yp))) {
      psi1 = yp;
      int_psi1 = yp * t;
    } else {
      const cplx w0 = (u_v - ym) / (u_v - yp);
      const cplx omq = one_minus_exp_neg(th * t);
      const cplx w = w0 * (1.0 - omq);
      psi1 = ym + (ym - yp) * w / (1.0 - w);
      const cplx lr = std::abs(w0) < 1.0 ? clog1p(w0 * omq / (1.0 - w0))
                                         : continuous_log_ratio(w0, th, t);
      int_psi1 = ym * t - (2.0 / s2) * lr;
    }
  }
  out.phi = p.kappa * int_psi1 + p.mu * u_x * t;
  out.psi[0] = psi1;
  return out;
}

PriceCoefficients price_coefficients(const HestonParams& p, double gamma, double tau) {
  require(tau >= 0.0, ErrorKind::InvalidArgument, "heston: tau must be non-negative");
  const ThetaValue tv = theta(p, gamma);
  const cplx th = tv.value;
  const double s2 = p.sigma * p.sigma;
  const double lam = p.lambda;
  // d theta / d u_x at u_x = -gamma; the gamma-derivative has the opposite sign.
  const cplx dth = s2 * gamma / th;
  const cplx omq = one_minus_exp_neg(th * tau);
  const cplx q = 1.0 - omq;
  const cplx dt = th * (1.0 + q) + lam * omq;

  const cplx drift =
      p.mu * tau + (2.0 * p.kappa / s2) * dth * (1.0 / th + tau / 2.0 - ((1.0 + q) + tau * (th + lam)) / dt);
  const cplx gam = (2.0 * omq - gamma * tau * dth) / dt +
                   gamma * omq * (dth * (1.0 + q) + tau * (lam * dth + gamma * s2)) / (dt * dt);

  const cplx dg = tv.derivative;
  const cplx printed = (2.0 * p.kappa / (s2 * th * dt)) *
                       (dt * (dg - 0.5 * s2 * gamma * tau) -
                        th * (dg * (1.0 + q) + tau * (lam * dg - gamma * s2)));

  PriceCoefficients out;
  out.drift = real_part_checked(drift, "heston drift coefficient");
  out.gamma_coef = real_part_checked(gam, "heston Gamma coefficient");
  out.drift_as_printed = real_part_checked(printed, "heston printed drift coefficient");
  return out;
}

double equilibrium_price(const HestonParams& p, double gamma, double T, double t, double V_t,
                         double X_t) {
  p.validate();
  require(t >= 0.0 && t <= T, ErrorKind::InvalidArgument,
          "heston.equilibrium_price: need 0 <= t <= T");
  require(V_t >= 0.0, ErrorKind::InvalidArgument, "heston.equilibrium_price: V_t must be >= 0");
  const double bound = max_horizon(p, gamma);
  if (!(T < bound)) {
    std::ostringstream os;
    os << "heston.equilibrium_price: T=" << T << " not below maximal horizon " << bound;
    fail(ErrorKind::HorizonExceeded, os.str());
  }
  const double tau = T - t;
  if (tau == 0.0) return X_t;
  const PriceCoefficients c = price_coefficients(p, gamma, tau);
  return c.drift - gamma * c.gamma_coef * V_t + X_t;
}

FunctionalCharacteristics characteristics(const HestonParams& p) {
  p.validate();
  FunctionalCharacteristics fc;
  fc.dimension = 2;
  fc.F = [p](std::span<const cplx> u) { return p.kappa * u[0] + p.mu * u[1]; };
  fc.R = [p](std::span<const cplx> u, std::span<cplx> out) {
    out[0] = 0.5 * p.sigma * p.sigma * u[0] * u[0] - p.lambda * u[0] + 0.5 * u[1] * u[1];
    out[1] = 0.0;
  };
  fc.domain_note =
      "entire in u; psi_1 explodes in finite time once sigma|u_x| > lambda or u_v exceeds the "
      "upper stationary point (lambda + theta)/sigma^2";
  return fc;
}

bool domain_contains(const HestonParams& p, const DomainQuery& q) {
  require(q.u_real.size() == 2, ErrorKind::InvalidArgument,
          "heston.domain_contains: expected (u_v, u_x)");
  require(q.horizon >= 0.0, ErrorKind::InvalidArgument, "domain query horizon must be >= 0");
  return explosion_time(p, q.u_real[0], q.u_real[1]) > q.horizon;
}

HestonModel::HestonModel(HestonParams p) : p_(p) { p_.validate(); }

ComplexExponents HestonModel::exponents(double t, std::span<const cplx> u) const {
  require(u.size() == 2, ErrorKind::InvalidArgument, "heston: expected (u_v, u_x)");
  return phi_psi(p_, t, u[0], u[1]);
}

bool HestonModel::domain_contains(const DomainQuery& q) const {
  return heston::domain_contains(p_, q);
}

FunctionalCharacteristics HestonModel::characteristics() const {
  return heston::characteristics(p_);
}

}  // namespace eqcapm::heston

#include "eqcapm/oujump.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm::oujump {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryRadius = 1e-8;

bool near_pole(const OUJumpParams& p, double u) {
  return std::abs(std::abs(u) - p.theta) <= kBoundaryRadius * std::max(1.0, p.theta);
}

}  // namespace

void OUJumpParams::validate() const {
  require(lambda > 0.0 && kappa >= 0.0 && theta > 0.0, ErrorKind::InvalidArgument,
          "oujump: need lambda > 0, kappa >= 0, theta > 0");
  require(std::isfinite(mu) && std::isfinite(x0), ErrorKind::InvalidArgument,
          "oujump: parameters must be finite");
}

FunctionalCharacteristics characteristics(const OUJumpParams& p) {
  p.validate();
  FunctionalCharacteristics fc;
  fc.dimension = 1;
  fc.F = [p](std::span<const cplx> u) {
    const cplx v = u[0];
    return p.lambda * p.mu * v + p.kappa * v * v / (p.theta * p.theta - v * v);
  };
  fc.R = [p](std::span<const cplx> u, std::span<cplx> out) { out[0] = -p.lambda * u[0]; };
  fc.domain_note = "F has simple poles at u = +theta and u = -theta";
  return fc;
}

double t_star(const OUJumpParams& p, double u) {
  p.validate();
  if (near_pole(p, u)) fail(ErrorKind::BoundaryCase, "oujump.t_star: |u| equals theta");
  if (std::abs(u) < p.theta) return kInf;
  return -(1.0 / (2.0 * p.lambda)) * std::log(p.theta * p.theta / (u * u));
}

ComplexExponents phi_psi(const OUJumpParams& p, double t, cplx u) {
  p.validate();
  require(t >= 0.0 && std::isfinite(t), ErrorKind::InvalidArgument,
          "oujump.phi_psi: time must be finite and non-negative");
  if (std::abs(u - p.theta) <= kBoundaryRadius * p.theta ||
      std::abs(u + p.theta) <= kBoundaryRadius * p.theta) {
    fail(ErrorKind::PoleEncountered, "oujump.phi_psi: u is a pole of F");
  }
  ComplexExponents out;
  out.psi = {u};
  if (t == 0.0) return out;
  if (!near_pole(p, u.real())) {
    const double ts = t_star(p, u.real());
    if (t >= ts) {
      std::ostringstream os;
      os << "oujump.phi_psi: t=" << t << " beyond t*=" << ts;
      fail(ErrorKind::HorizonExceeded, os.str());
    }
  }
  const double decay = std::exp(-p.lambda * t);
  const cplx ud = u * decay;
  const double th = p.theta;
  const cplx lr = std::log(th - ud) + std::log(th + ud) - std::log(th - u) - std::log(th + u);
  out.phi = (p.kappa / (2.0 * p.lambda)) * lr + p.mu * u * (1.0 - decay);
  out.psi[0] = ud;
  return out;
}

double equilibrium_price(const OUJumpParams& p, double gamma_tilde, double T, double t,
                         double X_t) {
  p.validate();
  require(t >= 0.0 && t <= T, ErrorKind::InvalidArgument,
          "oujump.equilibrium_price: need 0 <= t <= T");
  const double bound = t_star(p, -gamma_tilde);
  if (!(T < bound)) {
    std::ostringstream os;
    os << "oujump.equilibrium_price: T=" << T << " not below t*=" << bound;
    fail(ErrorKind::HorizonExceeded, os.str());
  }
  const double tau = T - t;
  if (tau == 0.0) return X_t;
  const double th2 = p.theta * p.theta;
  const double g2 = gamma_tilde * gamma_tilde;
  const double e1 = std::exp(-p.lambda * tau);
  const double e2 = e1 * e1;
  const double jump_term =
      p.kappa * th2 * gamma_tilde * (e2 - 1.0) / (p.lambda * (th2 - g2) * (th2 - g2 * e2));
  return jump_term + p.mu * (1.0 - e1) + e1 * X_t;
}

bool domain_contains(const OUJumpParams& p, const DomainQuery& q) {
  require(q.u_real.size() == 1, ErrorKind::InvalidArgument,
          "oujump.domain_contains: expected a scalar argument");
  require(q.horizon >= 0.0, ErrorKind::InvalidArgument, "domain query horizon must be >= 0");
  return t_star(p, q.u_real[0]) > q.horizon;
}

OUJumpModel::OUJumpModel(OUJumpParams p) : p_(p) { p_.validate(); }

ComplexExponents OUJumpModel::exponents(double t, std::span<const cplx> u) const {
  require(u.size() == 1, ErrorKind::InvalidArgument, "oujump: expected a scalar argument");
  return phi_psi(p_, t, u[0]);
}

bool OUJumpModel::domain_contains(const DomainQuery& q) const {
  return oujump::domain_contains(p_, q);
}

FunctionalCharacteristics OUJumpModel::characteristics() const {
  return oujump::characteristics(p_);
}

}  // namespace eqcapm::oujump

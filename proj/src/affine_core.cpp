#include "eqcapm/affine_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::PoleEncountered: return "PoleEncountered";
    case ErrorKind::InvalidTolerance: return "InvalidTolerance";
    case ErrorKind::BoundaryCase: return "BoundaryCase";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::NonRealResult: return "NonRealResult";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::InvalidDamping: return "InvalidDamping";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DegenerateTime: return "DegenerateTime";
    case ErrorKind::IntegrabilityViolation: return "IntegrabilityViolation";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::PricingError: return "PricingError";
  }
  return "Unknown";
}

cplx ComplexExponents::dot_state(std::span<const double> state) const {
  require(state.size() == psi.size(), ErrorKind::InvalidArgument,
          "state dimension does not match exponents");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) acc += psi[i] * state[i];
  return acc;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using State = std::vector<cplx>;  // [phi, psi_1, ..., psi_d]

class RiccatiSystem {
 public:
  RiccatiSystem(const FunctionalCharacteristics& chars, double guard)
      : chars_(chars), guard_(guard), r_(chars.dimension) {}

  // Returns false when the guard trips.
  bool eval(const State& y, State& dy) {
    const std::span<const cplx> psi(y.data() + 1, y.size() - 1);
    for (const cplx& p : psi) {
      if (!std::isfinite(std::abs(p)) || std::abs(p) > guard_) return false;
    }
    const cplx f = chars_.F(psi);
    chars_.R(psi, r_);
    if (!std::isfinite(std::abs(f)) || std::abs(f) > guard_) return false;
    dy[0] = f;
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (!std::isfinite(std::abs(r_[i])) || std::abs(r_[i]) > guard_) return false;
      dy[i + 1] = r_[i];
    }
    return true;
  }

 private:
  const FunctionalCharacteristics& chars_;
  double guard_;
  std::vector<cplx> r_;
};

void axpy(State& out, const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    cplx acc = 0.0;
    for (const auto& [coef, k] : terms) acc += coef * (*k)[i];
    out[i] = y[i] + h * acc;
  }
}

struct IntegrationOutcome {
  State y;
  bool exploded = false;
  double time_reached = 0.0;
};

IntegrationOutcome integrate(const FunctionalCharacteristics& chars, double t,
                             std::span<const cplx> u, const StepControl& control) {
  if (!(control.rel_tol > 0.0) || !(control.abs_tol > 0.0)) {
    fail(ErrorKind::InvalidTolerance, "riccati_integrate: tolerances must be positive");
  }
  require(u.size() == chars.dimension, ErrorKind::InvalidArgument,
          "riccati_integrate: argument dimension mismatch");
  require(t >= 0.0 && std::isfinite(t), ErrorKind::InvalidArgument,
          "riccati_integrate: time must be finite and non-negative");

  const std::size_t n = chars.dimension + 1;
  IntegrationOutcome out;
  out.y.assign(n, cplx{});
  std::copy(u.begin(), u.end(), out.y.begin() + 1);
  if (t == 0.0) return out;

  RiccatiSystem sys(chars, control.overflow_guard);
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  State& y = out.y;

  if (!sys.eval(y, k1)) {
    out.exploded = true;
    return out;
  }
  double now = 0.0;
  double h = std::min(t, 1e-3 * std::max(1.0, t));
  const double h_min = 1e-15 * std::max(1.0, t);

  for (std::size_t step = 0; step < control.max_steps; ++step) {
    if (now + h > t) h = t - now;
    bool ok = true;
    axpy(tmp, y, h, {{a21, &k1}});
    ok = ok && sys.eval(tmp, k2);
    if (ok) {
      axpy(tmp, y, h, {{a31, &k1}, {a32, &k2}});
      ok = sys.eval(tmp, k3);
    }
    if (ok) {
      axpy(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      ok = sys.eval(tmp, k4);
    }
    if (ok) {
      axpy(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      ok = sys.eval(tmp, k5);
    }
    if (ok) {
      axpy(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      ok = sys.eval(tmp, k6);
    }
    if (ok) {
      axpy(y5, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      ok = sys.eval(y5, k7);
    }

    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
        const double scale =
            control.abs_tol + control.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(e) / scale);
      }
    }

    if (ok && err <= 1.0) {
      now += h;
      y.swap(y5);
      k1.swap(k7);
      if (now >= t) {
        out.time_reached = t;
        return out;
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= factor;
    } else {
      h *= ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
    }
    if (h < h_min) {
      out.exploded = true;
      out.time_reached = now;
      return out;
    }
  }
  out.exploded = true;
  out.time_reached = now;
  return out;
}

}  // namespace

ComplexExponents riccati_integrate(const FunctionalCharacteristics& chars, double t,
                                   std::span<const cplx> u, const StepControl& control) {
  IntegrationOutcome res = integrate(chars, t, u, control);
  if (res.exploded) {
    std::ostringstream os;
    os << "riccati_integrate: solution exploded near t=" << res.time_reached
       << " (argument outside the analytic domain)";
    throw PoleError(os.str(), res.time_reached);
  }
  ComplexExponents ex;
  ex.phi = res.y[0];
  ex.psi.assign(res.y.begin() + 1, res.y.end());
  return ex;
}

double riccati_explosion_time(const FunctionalCharacteristics& chars, std::span<const cplx> u,
                              double limit, const StepControl& control) {
  IntegrationOutcome res = integrate(chars, limit, u, control);
  return res.exploded ? res.time_reached : std::numeric_limits<double>::infinity();
}

ComplexExponents AffineModel::exponents_x(double t, cplx u_x) const {
  std::vector<cplx> u(dimension(), cplx{});
  u.back() = u_x;
  return exponents(t, u);
}

cplx AffineModel::log_transform_x(double t, cplx u_x, std::span<const double> state) const {
  const ComplexExponents ex = exponents_x(t, u_x);
  return ex.phi + ex.dot_state(state);
}

bool AffineModel::domain_contains_x(double horizon, double u_x) const {
  DomainQuery q;
  q.horizon = horizon;
  q.u_real.assign(dimension(), 0.0);
  q.u_real.back() = u_x;
  return domain_contains(q);
}

NumericAffineModel::NumericAffineModel(FunctionalCharacteristics chars,
                                       std::vector<double> initial_state, StepControl control)
    : chars_(std::move(chars)), initial_state_(std::move(initial_state)), control_(control) {
  require(chars_.dimension > 0 && chars_.F && chars_.R, ErrorKind::InvalidArgument,
          "NumericAffineModel: incomplete characteristics");
  require(initial_state_.size() == chars_.dimension, ErrorKind::InvalidArgument,
          "NumericAffineModel: initial state dimension mismatch");
}

ComplexExponents NumericAffineModel::exponents(double t, std::span<const cplx> u) const {
  return riccati_integrate(chars_, t, u, control_);
}

bool NumericAffineModel::domain_contains(const DomainQuery& query) const {
  require(query.u_real.size() == chars_.dimension, ErrorKind::InvalidArgument,
          "domain query dimension mismatch");
  std::vector<cplx> u(query.u_real.begin(), query.u_real.end());
  return !std::isfinite(riccati_explosion_time(chars_, u, query.horizon, control_));
}

bool domain_contains(const AffineModel& model, const DomainQuery& query) {
  return model.domain_contains(query);
}

}  // namespace eqcapm

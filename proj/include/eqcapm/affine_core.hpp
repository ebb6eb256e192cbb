#pragma once

// Affine-process building blocks: exponents (phi, psi) of the extended
// transform formula E[exp(u.Y_T) | F_t] = exp(phi(tau,u) + psi(tau,u).Y_t),
// the functional characteristics (F, R) that drive the generalized Riccati
// system, and a numeric Riccati integrator used for generic models and as an
// independent check on closed-form solutions.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eqcapm {

using cplx = std::complex<double>;

/// Value of (phi, psi) at some (t, u). psi pairs componentwise with the
/// state Y = (V..., X); the payoff factor X is always the last component.
struct ComplexExponents {
  cplx phi{};
  std::vector<cplx> psi;

  cplx dot_state(std::span<const double> state) const;
};

/// F(u) = d/dt phi(t,u) at 0+, R(u) = d/dt psi(t,u) at 0+.
struct FunctionalCharacteristics {
  std::size_t dimension = 0;
  std::function<cplx(std::span<const cplx>)> F;
  std::function<void(std::span<const cplx> u, std::span<cplx> out)> R;
  /// Human-readable record of poles and branch points of F and R.
  std::string domain_note;
};

/// Membership query for the real domain: is (horizon, u_real) inside the set
/// on which the affine transform formula extends? Both variants of D_{t+}
/// (quantifier order) are treated as the same set.
struct DomainQuery {
  double horizon = 0.0;
  std::vector<double> u_real;
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  /// |F|, |R| or |psi| beyond this is treated as an explosion.
  double overflow_guard = 1e8;
  std::size_t max_steps = 2'000'000;
};

/// Adaptive Dormand-Prince 5(4) integration of
///   phi' = F(psi), phi(0) = 0;  psi' = R(psi), psi(0) = u.
/// Throws PoleError when the overflow guard trips (argument outside the
/// analytic domain) and InvalidTolerance for non-positive tolerances.
ComplexExponents riccati_integrate(const FunctionalCharacteristics& chars, double t,
                                   std::span<const cplx> u, const StepControl& control = {});

/// Time at which riccati_integrate first trips the overflow guard when run
/// up to `limit`; returns +inf if it does not explode before `limit`.
double riccati_explosion_time(const FunctionalCharacteristics& chars, std::span<const cplx> u,
                              double limit, const StepControl& control = {});

/// Common interface of affine factor models on R_+^m x R with the payoff
/// factor X as the last state coordinate.
class AffineModel {
 public:
  virtual ~AffineModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;
  virtual ComplexExponents exponents(double t, std::span<const cplx> u) const = 0;
  virtual bool domain_contains(const DomainQuery& query) const = 0;
  virtual FunctionalCharacteristics characteristics() const = 0;
  /// Initial state Y_0 as configured in the model parameters.
  virtual std::vector<double> initial_state() const = 0;

  /// Exponents at u = (0, ..., 0, u_x).
  ComplexExponents exponents_x(double t, cplx u_x) const;
  /// phi(t,(0,u_x)) + psi(t,(0,u_x)).Y
  cplx log_transform_x(double t, cplx u_x, std::span<const double> state) const;
  /// Membership of (horizon, (0, ..., 0, u_x)).
  bool domain_contains_x(double horizon, double u_x) const;
};

/// Affine model known only through its functional characteristics; the
/// exponents come from riccati_integrate.
class NumericAffineModel final : public AffineModel {
 public:
  NumericAffineModel(FunctionalCharacteristics chars, std::vector<double> initial_state,
                     StepControl control = {});

  std::size_t dimension() const override { return chars_.dimension; }
  std::string name() const override { return "numeric"; }
  ComplexExponents exponents(double t, std::span<const cplx> u) const override;
  bool domain_contains(const DomainQuery& query) const override;
  FunctionalCharacteristics characteristics() const override { return chars_; }
  std::vector<double> initial_state() const override { return initial_state_; }

 private:
  FunctionalCharacteristics chars_;
  std::vector<double> initial_state_;
  StepControl control_;
};

bool domain_contains(const AffineModel& model, const DomainQuery& query);

}  // namespace eqcapm

#pragma once

// Pure-jump Ornstein-Uhlenbeck factor
//   dX = -lambda (X - mu) dt + dJ,
// J compound Poisson with intensity kappa and symmetric Laplace(theta) jumps.

#include "eqcapm/affine_core.hpp"

namespace eqcapm::oujump {

struct OUJumpParams {
  double lambda = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  double theta = 0.0;
  double x0 = 0.0;

  void validate() const;
};

FunctionalCharacteristics characteristics(const OUJumpParams& p);

ComplexExponents phi_psi(const OUJumpParams& p, double t, cplx u);

double t_star(const OUJumpParams& p, double u);

double equilibrium_price(const OUJumpParams& p, double gamma_tilde, double T, double t, double X_t);

bool domain_contains(const OUJumpParams& p, const DomainQuery& q);

class OUJumpModel final : public AffineModel {
 public:
  explicit OUJumpModel(OUJumpParams p);

  std::size_t dimension() const override { return 1; }
  std::string name() const override { return "oujump"; }
  ComplexExponents exponents(double t, std::span<const cplx> u) const override;
  bool domain_contains(const DomainQuery& q) const override;
  FunctionalCharacteristics characteristics() const override;
  std::vector<double> initial_state() const override { return {p_.x0}; }

  const OUJumpParams& params() const { return p_; }

 private:
  OUJumpParams p_;
};

}  // namespace eqcapm::oujump

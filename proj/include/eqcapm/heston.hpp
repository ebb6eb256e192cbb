#pragma once

// Additive Heston factor model
//   dV = (kappa - lambda V) dt + sigma sqrt(V) dW1,   dX = mu dt + sqrt(V) dW2,
// with independent W1, W2 and state Y = (V, X).

#include <memory>

#include "eqcapm/affine_core.hpp"

namespace eqcapm::heston {

struct HestonParams {
  double mu = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double v0 = 0.0;
  double x0 = 0.0;

  void validate() const;
};

enum class Branch { Real, Imaginary };

/// theta(gamma) = sqrt(lambda^2 - sigma^2 gamma^2) with its gamma-derivative.
struct ThetaValue {
  cplx value;
  cplx derivative;  // d theta / d gamma = -sigma^2 gamma / theta
  Branch branch;
};

ThetaValue theta(const HestonParams& p, double gamma);

/// Supremum of horizons for which E[exp(-gamma X_T)] stays finite.
double max_horizon(const HestonParams& p, double gamma);

/// Explosion time of the Riccati solution started at real (u_v, u_x); +inf
/// when it never explodes.
double explosion_time(const HestonParams& p, double u_v, double u_x);

/// Closed-form exponents at u = (0, u_x).
ComplexExponents phi_psi(const HestonParams& p, double t, cplx u_x);
/// Closed-form exponents at a general u = (u_v, u_x).
ComplexExponents phi_psi(const HestonParams& p, double t, cplx u_v, cplx u_x);

/// Coefficients of S_t = drift - gamma * Gamma * V_t + X_t.
struct PriceCoefficients {
  double drift = 0.0;       // d phi / d u_x at u = (0, -gamma)
  double gamma_coef = 0.0;  // Gamma(tau, gamma)
  /// Drift expression without the mu * tau term and with the opposite sign on
  /// gamma * sigma^2; kept for comparison only, it is not d phi / d u_x.
  double drift_as_printed = 0.0;
};

PriceCoefficients price_coefficients(const HestonParams& p, double gamma, double tau);

double equilibrium_price(const HestonParams& p, double gamma, double T, double t, double V_t,
                         double X_t);

FunctionalCharacteristics characteristics(const HestonParams& p);

bool domain_contains(const HestonParams& p, const DomainQuery& q);

class HestonModel final : public AffineModel {
 public:
  explicit HestonModel(HestonParams p);

  std::size_t dimension() const override { return 2; }
  std::string name() const override { return "heston"; }
  ComplexExponents exponents(double t, std::span<const cplx> u) const override;
  bool domain_contains(const DomainQuery& q) const override;
  FunctionalCharacteristics characteristics() const override;
  std::vector<double> initial_state() const override { return {p_.v0, p_.x0}; }

  const HestonParams& params() const { return p_; }

 private:
  HestonParams p_;
};

}  // namespace eqcapm::heston

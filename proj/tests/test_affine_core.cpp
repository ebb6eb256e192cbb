#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "eqcapm/affine_core.hpp"
#include "eqcapm/error.hpp"
#include "eqcapm/heston.hpp"
#include "eqcapm/oujump.hpp"
#include "gen.hpp"

using namespace eqcapm;

namespace {

const heston::HestonParams kFig1{0.1, 0.006, 0.2, 0.3, 0.03, 1.0};
const oujump::OUJumpParams kFig3{2.0, 1.0, 30.0, 30.0, 1.0};

bool cclose(cplx a, cplx b, double rel, double abs = 1e-14) {
  return std::abs(a - b) <= rel * std::abs(b) + abs;
}

}  // namespace

TEST_CASE("riccati: initial condition is exact") {
  const auto fc = heston::characteristics(kFig1);
  const std::array<cplx, 2> u{0.0, -0.2};
  const auto e = riccati_integrate(fc, 0.0, u);
  CHECK(e.phi == cplx{});
  CHECK(e.psi[0] == cplx{});
  CHECK(e.psi[1] == cplx(-0.2));

  const auto fo = oujump::characteristics(kFig3);
  const std::array<cplx, 1> v{-0.2};
  const auto eo = riccati_integrate(fo, 0.0, v);
  CHECK(eo.phi == cplx{});
  CHECK(eo.psi[0] == cplx(-0.2));
}

TEST_CASE("riccati: OU-jump psi decays like u e^{-lambda t}") {
  const std::array<cplx, 1> u{-0.2};
  const auto e = riccati_integrate(oujump::characteristics(kFig3), 0.1, u);
  CHECK(std::abs(e.psi[0] - cplx(-0.2 * std::exp(-0.2))) < 1e-10);
  CHECK(e.psi[0].real() == doctest::Approx(-0.163746).epsilon(1e-5));
}

TEST_CASE("riccati: matches the Heston closed form") {
  const std::array<cplx, 2> u{0.0, -0.2};
  const auto num = riccati_integrate(heston::characteristics(kFig1), 0.5, u);
  const auto cf = heston::phi_psi(kFig1, 0.5, -0.2);
  CHECK(std::abs(num.phi - cf.phi) < 1e-7);
  CHECK(std::abs(num.psi[0] - cf.psi[0]) < 1e-7);
  CHECK(std::abs(num.psi[1] - cf.psi[1]) < 1e-12);
}

TEST_CASE("riccati: non-positive tolerances are rejected") {
  const std::array<cplx, 1> u{-0.2};
  StepControl bad;
  bad.rel_tol = 0.0;
  try {
    riccati_integrate(oujump::characteristics(kFig3), 0.1, u, bad);
    FAIL("expected InvalidTolerance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidTolerance);
  }
}

TEST_CASE("riccati: explosion raises PoleEncountered with the time reached") {
  const oujump::OUJumpParams p{2.0, 1.0, 30.0, 1.0, 1.0};
  const std::array<cplx, 1> u{2.0};
  try {
    riccati_integrate(oujump::characteristics(p), 1.0, u);
    FAIL("expected PoleEncountered");
  } catch (const PoleError& e) {
    CHECK(e.kind() == ErrorKind::PoleEncountered);
    CHECK(e.time_reached() == doctest::Approx(oujump::t_star(p, 2.0)).epsilon(0.05));
  }
}

TEST_CASE("characteristics are conservative") {
  const std::array<cplx, 2> z2{0.0, 0.0};
  const std::array<cplx, 1> z1{0.0};
  std::array<cplx, 2> r2{};
  std::array<cplx, 1> r1{};
  const auto fh = heston::characteristics(kFig1);
  const auto fo = oujump::characteristics(kFig3);
  CHECK(fh.F(z2) == cplx{});
  fh.R(z2, r2);
  CHECK(r2[0] == cplx{});
  CHECK(r2[1] == cplx{});
  CHECK(fo.F(z1) == cplx{});
  fo.R(z1, r1);
  CHECK(r1[0] == cplx{});
  CHECK_FALSE(fh.domain_note.empty());
  CHECK_FALSE(fo.domain_note.empty());
}

TEST_CASE("domain membership: spec examples") {
  const oujump::OUJumpModel ou(kFig3);
  CHECK(ou.domain_contains_x(0.1, -0.2));
  try {
    ou.domain_contains_x(1.0, -30.0);
    FAIL("expected BoundaryCase");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryCase);
  }
  const heston::HestonModel h(kFig1);
  CHECK(h.domain_contains_x(0.5, -0.2));
  CHECK(domain_contains(h, DomainQuery{0.5, {0.0, -0.2}}));
  // sigma |u| > lambda: finite horizon
  CHECK(h.domain_contains_x(20.0, -1.0));
  CHECK_FALSE(h.domain_contains_x(21.0, -1.0));
}

TEST_CASE("NumericAffineModel reproduces the closed forms") {
  const NumericAffineModel num(heston::characteristics(kFig1), {kFig1.v0, kFig1.x0});
  const heston::HestonModel cf(kFig1);
  const std::array<double, 2> y{0.03, 1.0};
  for (double s : {0.0, 0.7, 3.0}) {
    const cplx a = num.log_transform_x(0.5, cplx(-0.2, s), y);
    const cplx b = cf.log_transform_x(0.5, cplx(-0.2, s), y);
    CHECK(std::abs(a - b) < 1e-7);
  }
  CHECK(num.domain_contains_x(0.5, -0.2));
  CHECK_FALSE(num.domain_contains_x(25.0, -1.0));
}

TEST_CASE("property: flow identity of the closed forms") {
  testgen::Gen g(11);
  for (int i = 0; i < 200; ++i) {
    heston::HestonParams p{g.uniform(-0.2, 0.2), g.uniform(0.001, 0.05), g.uniform(0.1, 2.0),
                           g.uniform(0.1, 0.8), g.uniform(0.0, 0.1), g.uniform(-1.0, 1.0)};
    const double bound = p.lambda / p.sigma;
    const cplx u(g.uniform(-0.9, 0.9) * bound, g.uniform(-3.0, 3.0));
    const double t = g.uniform(0.01, 1.0), s = g.uniform(0.01, 1.0);
    const auto ts = heston::phi_psi(p, t + s, u);
    const auto e1 = heston::phi_psi(p, t, u);
    const auto e2 = heston::phi_psi(p, s, e1.psi[0], e1.psi[1]);
    CHECK(cclose(e1.phi + e2.phi, ts.phi, 1e-9, 1e-13));
    CHECK(cclose(e2.psi[0], ts.psi[0], 1e-9, 1e-13));
  }
  for (int i = 0; i < 200; ++i) {
    oujump::OUJumpParams p{g.uniform(0.2, 5.0), g.uniform(-1.0, 1.0), g.uniform(1.0, 40.0),
                           g.uniform(2.0, 40.0), g.uniform(-1.0, 1.0)};
    const cplx u(g.uniform(-0.9, 0.9) * p.theta, g.uniform(-5.0, 5.0));
    const double t = g.uniform(0.01, 1.0), s = g.uniform(0.01, 1.0);
    const auto ts = oujump::phi_psi(p, t + s, u);
    const auto e1 = oujump::phi_psi(p, t, u);
    const auto e2 = oujump::phi_psi(p, s, e1.psi[0]);
    CHECK(cclose(e1.phi + e2.phi, ts.phi, 1e-9, 1e-13));
    CHECK(cclose(e2.psi[0], ts.psi[0], 1e-9, 1e-13));
  }
}

TEST_CASE("property: conjugate symmetry and modulus bound") {
  testgen::Gen g(12);
  const heston::HestonModel h(kFig1);
  const oujump::OUJumpModel o(kFig3);
  for (int i = 0; i < 200; ++i) {
    const double t = g.uniform(0.0, 2.0);
    const cplx u(g.uniform(-0.6, 0.6), g.uniform(-10.0, 10.0));
    const auto a = h.exponents_x(t, u), b = h.exponents_x(t, std::conj(u));
    CHECK(cclose(std::conj(a.phi), b.phi, 1e-12));
    CHECK(cclose(std::conj(a.psi[0]), b.psi[0], 1e-12));
    const auto c = o.exponents_x(t, u), d = o.exponents_x(t, std::conj(u));
    CHECK(cclose(std::conj(c.phi), d.phi, 1e-12));

    // purely imaginary argument: |E[e^{isX}]| <= 1 for every admissible state
    const double s = u.imag();
    const std::array<double, 2> y{g.uniform(0.0, 1.0), g.uniform(-2.0, 2.0)};
    CHECK(h.log_transform_x(t, cplx(0.0, s), y).real() <= 1e-12);
    const std::array<double, 1> x{y[1]};
    CHECK(o.log_transform_x(t, cplx(0.0, s), x).real() <= 1e-12);
  }
}

TEST_CASE("property: domain membership is monotone in the horizon") {
  testgen::Gen g(13);
  const heston::HestonModel h(kFig1);
  const oujump::OUJumpParams po{2.0, 1.0, 30.0, 1.0, 1.0};
  const oujump::OUJumpModel o(po);
  for (int i = 0; i < 500; ++i) {
    const double T = g.uniform(0.0, 40.0), Tp = g.uniform(0.0, T);
    const double ux = g.uniform(-2.0, 2.0);
    if (std::abs(std::abs(ux) * kFig1.sigma - kFig1.lambda) > 1e-6 && h.domain_contains_x(T, ux)) {
      CHECK(h.domain_contains_x(Tp, ux));
    }
    const double uo = g.uniform(-3.0, 3.0);
    if (std::abs(std::abs(uo) - po.theta) > 1e-6 && o.domain_contains_x(T * 0.05, uo)) {
      CHECK(o.domain_contains_x(Tp * 0.05, uo));
    }
  }
}

TEST_CASE("property: numeric Riccati matches closed forms on random arguments") {
  testgen::Gen g(14);
  for (int i = 0; i < 100; ++i) {
    heston::HestonParams p{g.uniform(-0.2, 0.2), g.uniform(0.001, 0.05), g.uniform(0.1, 2.0),
                           g.uniform(0.1, 0.8), 0.0, 0.0};
    const double t = g.uniform(0.0, 2.0);
    const std::array<cplx, 2> u{cplx(g.uniform(-0.5, 0.5), g.uniform(-2.0, 2.0)),
                                cplx(g.uniform(-0.9, 0.9) * p.lambda / p.sigma,
                                     g.uniform(-2.0, 2.0))};
    if (heston::explosion_time(p, u[0].real(), u[1].real()) < 2.0 * t) continue;
    const auto num = riccati_integrate(heston::characteristics(p), t, u);
    const auto cf = heston::phi_psi(p, t, u[0], u[1]);
    CHECK(std::abs(num.phi - cf.phi) < 1e-7);
    CHECK(std::abs(num.psi[0] - cf.psi[0]) < 1e-7);
  }
}

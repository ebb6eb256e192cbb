#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eqcapm/error.hpp"
#include "eqcapm/info_based.hpp"
#include "gen.hpp"

using namespace eqcapm;
using namespace eqcapm::info;

namespace {

DiscretePrior binary(double p1) { return {{0.0, 1.0}, {1.0 - p1, p1}}; }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::PricingError;
}

double binary_closed(double p1, double g, double sigma, double T, double t, double xi) {
  const double like = std::exp(T / (T - t) * (sigma * xi - 0.5 * sigma * sigma * t));
  const double num = p1 * std::exp(-g) * like;
  return num / (1.0 - p1 + num);
}

}  // namespace

TEST_CASE("conditional density at t = 0 is the prior") {
  const auto spec = InfoModelSpec::single(binary(0.8), 1.0, 5.0, 0.6);
  const auto d = conditional_density(spec, 0, {0.0, {0.0}});
  CHECK(d.discrete);
  CHECK(d.weights[0] == doctest::Approx(0.2));
  CHECK(d.weights[1] == doctest::Approx(0.8));

  const auto e = InfoModelSpec::single(ExponentialPrior{1.0}, 1.0, 5.0, 0.6);
  const auto de = conditional_density(e, 0, {0.0, {0.0}});
  CHECK_FALSE(de.discrete);
  CHECK(de.mass() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(de.integrate([](double x) { return x; }) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("binary posterior is monotone in the information") {
  const auto spec = InfoModelSpec::single(binary(0.8), 1.0, 5.0, 0.6);
  double prev = 0.0;
  for (double xi = -10.0; xi <= 10.0; xi += 0.5) {
    const auto d = conditional_density(spec, 0, {2.0, {xi}});
    CHECK(d.weights[1] > prev);
    prev = d.weights[1];
  }
  CHECK(prev > 1.0 - 1e-6);
}

TEST_CASE("prices: spec examples") {
  const auto bond = InfoModelSpec::single(binary(0.8), 1.0, 5.0, 0.6);
  const double expected = 0.8 * std::exp(-0.6) / (0.2 + 0.8 * std::exp(-0.6));
  CHECK(price(bond, {0.0, {0.0}})[0] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(binary_bond_price(bond, {0.0, {0.0}}) == doctest::Approx(0.68704).epsilon(1e-5));
  const auto tilted = std::get<DiscretePrior>(tilted_density(binary(0.8), 0.6));
  CHECK(tilted.probs[1] == doctest::Approx(0.68704).epsilon(1e-5));

  const auto ex = InfoModelSpec::single(ExponentialPrior{1.0}, 1.0, 5.0, 0.6);
  CHECK(price(ex, {0.0, {0.0}})[0] == doctest::Approx(0.625).epsilon(1e-6));
  const auto te = std::get<ExponentialPrior>(tilted_density(ExponentialPrior{1.0}, 0.6));
  CHECK(1.0 / te.kappa == doctest::Approx(1.6));
  const auto same = std::get<ExponentialPrior>(tilted_density(ExponentialPrior{2.0}, 0.0));
  CHECK(same.kappa == 2.0);
}

TEST_CASE("binary bond: closed form, generic route and limits") {
  testgen::Gen g(61);
  for (int i = 0; i < 200; ++i) {
    const double p1 = g.uniform(0.05, 0.95), gt = g.uniform(-1.0, 2.0), s = g.uniform(0.1, 2.0);
    const double T = g.uniform(1.0, 10.0), t = g.uniform(0.0, 0.99 * T), xi = g.uniform(-3.0, 3.0);
    const auto spec = InfoModelSpec::single(binary(p1), s, T, gt);
    const InfoPathState st{t, {xi}};
    const double b = binary_bond_price(spec, st);
    CHECK(b == doctest::Approx(binary_closed(p1, gt, s, T, t, xi)).epsilon(1e-12));
    CHECK(b == doctest::Approx(price(spec, st)[0]).epsilon(1e-12));
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
  }
  const auto spec = InfoModelSpec::single(binary(0.8), 1.0, 5.0, 0.6);
  CHECK(binary_bond_price(spec, {2.0, {-200.0}}) < 1e-100);
  CHECK(binary_bond_price(spec, {2.0, {-1e6}}) >= 0.0);
  CHECK(kind_of([&] { binary_bond_price(spec, {5.0, {0.0}}); }) == ErrorKind::DegenerateTime);
}

TEST_CASE("property: binary bond decreases strictly in risk aversion") {
  testgen::Gen g(62);
  for (int i = 0; i < 300; ++i) {
    const double T = 5.0, t = g.uniform(0.0, 4.9), xi = g.uniform(-2.0, 2.0);
    const double a = g.uniform(0.0, 1.0), b = a + g.uniform(0.01, 1.0);
    const auto sa = InfoModelSpec::single(binary(0.8), 1.0, T, a);
    const auto sb = InfoModelSpec::single(binary(0.8), 1.0, T, b);
    CHECK(binary_bond_price(sb, {t, {xi}}) < binary_bond_price(sa, {t, {xi}}));
  }
}

TEST_CASE("property: posterior normalization") {
  testgen::Gen g(63);
  for (int i = 0; i < 200; ++i) {
    const double T = g.uniform(1.0, 5.0), t = g.uniform(0.0, 0.95 * T);
    const double s = g.uniform(0.2, 1.5);
    const double xi = s * g.uniform(0.0, 3.0) * t + g.normal() * std::sqrt(t * (T - t) / T);
    const auto e = InfoModelSpec::single(ExponentialPrior{g.uniform(0.5, 2.0)}, s, T, 0.3);
    CHECK(std::abs(conditional_density(e, 0, {t, {xi}}).mass() - 1.0) < 1e-8);
    DiscretePrior d{{-1.0, 0.0, 0.5, 2.0}, {0.1, 0.2, 0.3, 0.4}};
    const auto sd = InfoModelSpec::single(d, s, T, 0.3);
    CHECK(std::abs(conditional_density(sd, 0, {t, {xi}}).mass() - 1.0) < 1e-12);
  }
}

TEST_CASE("grid priors: normalization, coverage and bounded supports") {
  GridPrior uni{{}, {}, true, true};
  for (int i = 0; i <= 1000; ++i) {
    uni.x.push_back(i / 1000.0);
    uni.density.push_back(1.0);
  }
  const auto spec = InfoModelSpec::single(uni, 1.0, 2.0, 0.0);
  const auto d = conditional_density(spec, 0, {0.5, {0.3}});
  CHECK(std::abs(d.mass() - 1.0) < 1e-8);

  GridPrior narrow = uni;
  narrow.bounded_below = narrow.bounded_above = false;
  const auto bad = InfoModelSpec::single(narrow, 1.0, 2.0, 0.0);
  CHECK(kind_of([&] { conditional_density(bad, 0, {0.5, {0.3}}); }) == ErrorKind::InvalidGrid);

  const GridPrior tab = tabulate_exponential(1.0, 40.0, 40001);
  double m = 0.0;
  for (std::size_t j = 0; j + 1 < tab.x.size(); ++j) {
    m += 0.5 * (tab.density[j] + tab.density[j + 1]) * (tab.x[j + 1] - tab.x[j]);
  }
  CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tab.bounded_below);
}

TEST_CASE("exponential closed form") {
  const auto ex = InfoModelSpec::single(ExponentialPrior{1.0}, 1.0, 5.0, 0.6);
  CHECK(exponential_price(ex, {1e-7, {0.0}}) == doctest::Approx(0.625).epsilon(1e-5));
  CHECK(kind_of([&] { exponential_price(ex, {0.0, {0.0}}); }) == ErrorKind::DegenerateTime);
  CHECK(kind_of([&] { exponential_price(ex, {5.0, {0.0}}); }) == ErrorKind::DegenerateTime);
  CHECK(kind_of([&] { price(ex, {5.0 * (1.0 - 1e-10), {0.0}}); }) == ErrorKind::DegenerateTime);

  testgen::Gen g(64);
  for (int i = 0; i < 50; ++i) {
    const double kappa = g.uniform(0.3, 3.0), s = g.uniform(0.2, 1.5), gt = g.uniform(-0.2, 1.0);
    const double T = 5.0, t = g.uniform(0.05, 4.5);
    const double x = std::exponential_distribution<double>(1.0 / kappa)(g.engine());
    const double xi = s * x * t + g.normal() * std::sqrt(t * (T - t) / T);
    const auto spec = InfoModelSpec::single(ExponentialPrior{kappa}, s, T, gt);
    const double cf = exponential_price(spec, {t, {xi}});
    CHECK(cf > 0.0);
    CHECK(testgen::rel_close(price(spec, {t, {xi}})[0], cf, 1e-5));
  }
}

TEST_CASE("integrability of the tilt") {
  CHECK(kind_of([] { tilted_density(ExponentialPrior{1.0}, -1.5); }) ==
        ErrorKind::IntegrabilityViolation);
  const auto spec = InfoModelSpec::single(ExponentialPrior{1.0}, 1.0, 5.0, -1.5);
  CHECK(kind_of([&] { price(spec, {1.0, {0.5}}); }) == ErrorKind::IntegrabilityViolation);
  CHECK(kind_of([&] { exponential_price(spec, {1.0, {0.5}}); }) ==
        ErrorKind::IntegrabilityViolation);
  // a mild negative tilt is fine while gamma_tilde + 1/kappa > 0
  const auto ok = InfoModelSpec::single(ExponentialPrior{1.0}, 1.0, 5.0, -0.5);
  CHECK(price(ok, {0.0, {0.0}})[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("risk-neutral weight gives the plain filter") {
  DiscretePrior d{{-1.0, 0.0, 0.5, 2.0}, {0.1, 0.2, 0.3, 0.4}};
  const auto spec = InfoModelSpec::single(d, 0.7, 3.0, 0.0);
  const InfoPathState st{1.2, {0.4}};
  const auto post = conditional_density(spec, 0, st);
  CHECK(price(spec, st)[0] == doctest::Approx(post.integrate([](double x) { return x; })));
  CHECK(posterior_moments(spec, st, 0.0).mean == doctest::Approx(price(spec, st)[0]));
}

TEST_CASE("factorized and tensor-grid routes agree for several factors") {
  InfoModelSpec lin;
  lin.T = 3.0;
  lin.factors = {{binary(0.7), 1.0}, {DiscretePrior{{0.0, 1.0, 3.0}, {0.2, 0.5, 0.3}}, 0.5}};
  lin.payoffs = {InfoPayoff::linear(0), InfoPayoff::linear(1)};
  lin.tilde_gamma = {0.4, 0.2};
  InfoModelSpec gen = lin;
  gen.payoffs = {InfoPayoff{std::nullopt, [](std::span<const double> x) { return x[0]; }},
                 InfoPayoff{std::nullopt, [](std::span<const double> x) { return x[1]; }}};
  const InfoPathState st{1.0, {0.5, -0.2}};
  const auto a = price(lin, st), b = price(gen, st);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));

  // a genuinely non-linear payoff couples the factors
  InfoModelSpec call = lin;
  call.payoffs = {InfoPayoff{std::nullopt,
                             [](std::span<const double> x) { return std::max(x[0] + x[1] - 1.0, 0.0); }}};
  call.tilde_gamma = {0.3};
  double num = 0.0, den = 0.0;
  const auto d0 = conditional_density(lin, 0, st), d1 = conditional_density(lin, 1, st);
  for (std::size_t i = 0; i < d0.x.size(); ++i) {
    for (std::size_t j = 0; j < d1.x.size(); ++j) {
      const double f = std::max(d0.x[i] + d1.x[j] - 1.0, 0.0);
      const double w = d0.weights[i] * d1.weights[j] * std::exp(-0.3 * f);
      num += f * w;
      den += w;
    }
  }
  CHECK(price(call, st)[0] == doctest::Approx(num / den).epsilon(1e-12));
}

TEST_CASE("standard normal helpers") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-15));
  CHECK(normal_cdf(-10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-13));
  CHECK(normal_cdf(3.0) == doctest::Approx(0.9986501019683699).epsilon(1e-15));
  auto direct = [](double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / normal_cdf(z);
  };
  for (double z : {-30.0, -8.0, -5.0, -3.0, 0.0, 2.0}) {
    CHECK(inverse_mills(z) == doctest::Approx(direct(z)).epsilon(1e-11));
  }
  CHECK(inverse_mills(-5.0 - 1e-9) == doctest::Approx(inverse_mills(-5.0 + 1e-9)).epsilon(1e-8));
  CHECK(inverse_mills(-1e4) == doctest::Approx(1e4).epsilon(1e-7));
}

TEST_CASE("bridge simulation: grid checks and moments") {
  const auto spec = InfoModelSpec::single(binary(0.8), 0.7, 2.0, 0.6);
  const std::vector<double> x{1.0};
  const std::vector<double> bad{0.0, 1.0, 2.0};
  CHECK(kind_of([&] { simulate_information_paths(spec, x, bad, 1); }) == ErrorKind::InvalidGrid);
  const std::vector<double> back{0.5, 0.2};
  CHECK(kind_of([&] { simulate_information_paths(spec, x, back, 1); }) == ErrorKind::InvalidGrid);

  const std::vector<double> grid{0.0, 0.5, 1.0};
  const std::size_t n = 100000;
  double s1 = 0.0, s2 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto path = simulate_information_paths(spec, x, grid, 5, i);
    CHECK_FALSE(path[0].xi[0] != 0.0);
    m1 += path[1].xi[0];
    const double b = path[2].xi[0] - 0.7 * 1.0;  // bridge value at T/2
    s1 += b;
    s2 += b * b;
  }
  const double nn = static_cast<double>(n);
  // mean of xi_{0.5} given X = 1 is sigma x t = 0.35, sd sqrt(0.5 * 1.5 / 2)
  CHECK(std::abs(m1 / nn - 0.35) < 3.0 * std::sqrt(0.375 / nn));
  const double var = s2 / nn - (s1 / nn) * (s1 / nn);
  // T/2 variance T/4 = 0.5; sd of the sample variance is ~ var sqrt(2/n)
  CHECK(std::abs(var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / nn));

  const auto a = simulate_information_paths(spec, x, grid, 5, 3);
  const auto b = simulate_information_paths(spec, x, grid, 5, 3);
  const auto c = simulate_information_paths(spec, x, grid, 5, 4);
  CHECK(a[2].xi == b[2].xi);
  CHECK(a[2].xi != c[2].xi);
}

TEST_CASE("innovations: conditional variance at the start and path checks") {
  const auto ex = InfoModelSpec::single(ExponentialPrior{1.0}, 1.0, 5.0, 0.6);
  std::vector<double> grid;
  for (int i = 0; i <= 2500; ++i) grid.push_back(i * 1e-3);
  const std::vector<double> x{0.8};
  const auto path = simulate_information_paths(ex, x, grid, 11);
  const auto steps = innovation_and_variance(ex, path);
  REQUIRE(steps.size() == grid.size() - 1);
  CHECK(steps[0].var_q == doctest::Approx(0.390625).epsilon(1e-6));
  CHECK(steps[0].price == doctest::Approx(0.625).epsilon(1e-7));
  double qv = 0.0;
  for (const auto& s : steps) {
    CHECK(s.var_q >= 0.0);
    qv += s.dW * s.dW;
  }
  CHECK(qv == doctest::Approx(2.5).epsilon(0.05));
  CHECK(kind_of([&] {
          std::vector<InfoPathState> p{{4.9999999999, {0.0}}, {4.99999999999, {0.0}}};
          innovation_and_variance(ex, p);
        }) == ErrorKind::DegenerateTime);
}

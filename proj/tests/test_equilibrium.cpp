#include <doctest.h>

#include <cmath>
#include <limits>

#include "eqcapm/equilibrium.hpp"
#include "eqcapm/error.hpp"
#include "gen.hpp"

using namespace eqcapm;

namespace {

MarketSpec market(std::vector<AgentSpec> agents, std::vector<double> n) {
  MarketSpec m;
  m.agents = std::move(agents);
  m.net_supply = n;
  m.payoffs.assign(n.size(), LinearPayoff{});
  m.horizon = 1.0;
  return m;
}

MarketSpec random_market(testgen::Gen& g) {
  const int K = g.integer(1, 5);
  const int A = g.integer(1, 8);
  MarketSpec m;
  m.horizon = 1.0;
  for (int k = 0; k < K; ++k) {
    m.net_supply.push_back(g.uniform(-5.0, 5.0));
    m.payoffs.push_back(LinearPayoff{});
  }
  for (int a = 0; a < A; ++a) {
    AgentSpec ag;
    ag.risk_aversion = g.log_uniform(1e-3, 1e3);
    ag.endowment_constant = g.uniform(-10.0, 10.0);
    for (int k = 0; k < K; ++k) ag.endowment_weights.push_back(g.uniform(-3.0, 3.0));
    m.agents.push_back(ag);
  }
  return m;
}

}  // namespace

TEST_CASE("adjusted risk aversion: spec examples") {
  auto two = adjusted_risk_aversion(market({{0.4, 0.0, {0.0}}, {0.4, 0.0, {0.0}}}, {1.0}));
  CHECK(two.gamma_market == doctest::Approx(0.2));
  CHECK(two.tilde_gamma[0] == doctest::Approx(0.2));

  auto one = adjusted_risk_aversion(market({{0.6, 0.0, {0.0}}}, {1.0}));
  CHECK(one.tilde_gamma[0] == doctest::Approx(0.6));

  auto mixed =
      adjusted_risk_aversion(market({{0.5, 0.0, {1.0, 0.0}}, {1.0, 0.0, {0.0, 0.0}}}, {0.0, 1.0}));
  CHECK(mixed.gamma_market == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(mixed.tilde_gamma[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(mixed.tilde_gamma[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("optimal strategies: spec examples") {
  auto sym = optimal_strategies(market({{0.4, 0.0, {0.0}}, {0.4, 0.0, {0.0}}}, {1.0}));
  CHECK(sym[0][0] == doctest::Approx(0.5));
  CHECK(sym[1][0] == doctest::Approx(0.5));

  auto single = optimal_strategies(market({{2.0, 0.0, {0.7}}}, {1.3}));
  CHECK(single[0][0] == 1.3);

  auto mixed =
      optimal_strategies(market({{0.5, 0.0, {1.0, 0.0}}, {1.0, 0.0, {0.0, 0.0}}}, {0.0, 1.0}));
  CHECK(mixed[0][0] == doctest::Approx(-1.0 / 3.0));
  CHECK(mixed[0][1] == doctest::Approx(2.0 / 3.0));
  CHECK(mixed[0][0] + mixed[1][0] == 0.0);
  CHECK(mixed[0][1] + mixed[1][1] == 1.0);
}

TEST_CASE("pricing weight: spec examples and overflow guard") {
  CHECK(pricing_weight(std::vector<double>{0.6}, std::vector<double>{0.0}) == 1.0);
  CHECK(pricing_weight(std::vector<double>{0.6}, std::vector<double>{1.0}) ==
        doctest::Approx(0.548812).epsilon(1e-6));
  CHECK(pricing_weight(std::vector<double>{0.2, 0.2}, std::vector<double>{1.0, 0.5}) ==
        doctest::Approx(0.740818).epsilon(1e-6));
  try {
    pricing_weight(std::vector<double>{1.0}, std::vector<double>{-800.0});
    FAIL("expected Overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Overflow);
  }
  const auto m = market({{0.6, 0.0, {0.0}}}, {1.0});
  CHECK(pricing_weight(m, {1.0}) == doctest::Approx(std::exp(-0.6)));
}

TEST_CASE("market validation") {
  MarketSpec m = market({}, {1.0});
  CHECK_THROWS_AS(m.validate(), Error);
  m = market({{-1.0, 0.0, {0.0}}}, {1.0});
  CHECK_THROWS_AS(m.validate(), Error);
  m = market({{1.0, 0.0, {0.0, 0.0}}}, {1.0});
  CHECK_THROWS_AS(m.validate(), Error);
  m = single_agent_market(0.2, {1.1, 1.0});
  CHECK_THROWS_AS(m.validate(), Error);
  m = single_agent_market(0.2, {1.0, 1.1});
  CHECK_NOTHROW(m.validate());
  CHECK(m.securities() == 3);
  const auto ar = adjusted_risk_aversion(m);
  for (double g : ar.tilde_gamma) CHECK(g == doctest::Approx(0.2));
}

TEST_CASE("payoff evaluation") {
  CHECK(evaluate_payoff(LinearPayoff{}, -1.5) == -1.5);
  CHECK(evaluate_payoff(CallPayoff{1.0}, 1.5) == 0.5);
  CHECK(evaluate_payoff(CallPayoff{1.0}, 0.5) == 0.0);
}

TEST_CASE("property: market clears exactly") {
  testgen::Gen g(21);
  for (int i = 0; i < 1000; ++i) {
    const MarketSpec m = random_market(g);
    const auto th = optimal_strategies(m);
    for (std::size_t k = 0; k < m.net_supply.size(); ++k) {
      double sum = 0.0, mag = 0.0;
      for (const auto& a : th) {
        sum += a[k];
        mag += std::abs(a[k]);
      }
      CHECK(std::abs(sum - m.net_supply[k]) <= 4.0 * std::numeric_limits<double>::epsilon() * mag);
    }
  }
}

TEST_CASE("property: harmonic risk aversion and adjusted weights") {
  testgen::Gen g(22);
  for (int i = 0; i < 500; ++i) {
    const MarketSpec m = random_market(g);
    const auto ar = adjusted_risk_aversion(m);
    double inv = 0.0;
    for (const auto& a : m.agents) inv += 1.0 / a.risk_aversion;
    CHECK(testgen::rel_close(1.0 / ar.gamma_market, inv, 1e-13));
    for (std::size_t k = 0; k < m.net_supply.size(); ++k) {
      double eta = 0.0;
      for (const auto& a : m.agents) eta += a.endowment_weights[k];
      CHECK(testgen::rel_close(ar.tilde_gamma[k], ar.gamma_market * (eta + m.net_supply[k]), 1e-12,
                               1e-14));
    }
  }
}

TEST_CASE("property: strategies invariant under common scaling of risk aversions") {
  testgen::Gen g(23);
  for (int i = 0; i < 300; ++i) {
    MarketSpec m = random_market(g);
    const auto before = optimal_strategies(m);
    const double c = g.log_uniform(0.01, 100.0);
    for (auto& a : m.agents) a.risk_aversion *= c;
    const auto after = optimal_strategies(m);
    for (std::size_t a = 0; a < before.size(); ++a) {
      for (std::size_t k = 0; k < before[a].size(); ++k) {
        CHECK(testgen::rel_close(after[a][k], before[a][k], 1e-11, 1e-11));
      }
    }
  }
}

TEST_CASE("property: zero-supply coordinate does not move the pricing weight") {
  testgen::Gen g(24);
  for (int i = 0; i < 300; ++i) {
    MarketSpec m = random_market(g);
    const std::size_t K = m.net_supply.size();
    const std::size_t z = static_cast<std::size_t>(g.integer(0, static_cast<int>(K) - 1));
    double eta = 0.0;
    for (const auto& a : m.agents) eta += a.endowment_weights[z];
    m.net_supply[z] = -eta;
    const auto ar = adjusted_risk_aversion(m);
    CHECK(std::abs(ar.tilde_gamma[z]) < 1e-12);

    double scale = 1.0;
    for (double w : ar.tilde_gamma) scale += std::abs(w);
    std::vector<double> pay(K);
    for (auto& x : pay) x = g.uniform(-1.0, 1.0) / scale;
    auto moved = pay;
    moved[z] += g.uniform(-50.0, 50.0);
    CHECK(testgen::rel_close(pricing_weight(m, moved), pricing_weight(m, pay), 1e-9));
  }
}

TEST_CASE("property: endowment constants never matter") {
  testgen::Gen g(25);
  for (int i = 0; i < 100; ++i) {
    MarketSpec m = random_market(g);
    const auto a1 = adjusted_risk_aversion(m);
    const auto s1 = optimal_strategies(m);
    for (auto& a : m.agents) a.endowment_constant = g.uniform(-1e6, 1e6);
    const auto a2 = adjusted_risk_aversion(m);
    CHECK(a1.tilde_gamma == a2.tilde_gamma);
    CHECK(s1 == optimal_strategies(m));
  }
}

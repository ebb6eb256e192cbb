#include "eqcapm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm {

double evaluate_payoff(const PayoffDescriptor& f, double x) {
  if (const auto* c = std::get_if<CallPayoff>(&f)) return std::max(x - c->strike, 0.0);
  return x;
}

void MarketSpec::validate() const {
  require(!agents.empty(), ErrorKind::InvalidArgument, "market: at least one agent required");
  require(!payoffs.empty(), ErrorKind::InvalidArgument, "market: at least one security required");
  const std::size_t k = payoffs.size();
  require(net_supply.size() == k, ErrorKind::InvalidArgument,
          "market: net supply length must equal the number of securities");
  for (const AgentSpec& a : agents) {
    require(a.risk_aversion > 0.0 && std::isfinite(a.risk_aversion), ErrorKind::InvalidArgument,
            "market: risk aversion must be positive");
    require(a.endowment_weights.size() == k, ErrorKind::InvalidArgument,
            "market: endowment weights length must equal the number of securities");
  }
  double last = -std::numeric_limits<double>::infinity();
  for (const PayoffDescriptor& f : payoffs) {
    if (const auto* c = std::get_if<CallPayoff>(&f)) {
      require(c->strike > last, ErrorKind::InvalidArgument,
              "market: call strikes must be strictly increasing");
      last = c->strike;
    }
  }
}

AdjustedRiskAversion adjusted_risk_aversion(const MarketSpec& m) {
  m.validate();
  double inv = 0.0;
  for (const AgentSpec& a : m.agents) inv += 1.0 / a.risk_aversion;
  AdjustedRiskAversion out;
  out.gamma_market = 1.0 / inv;
  out.tilde_gamma.assign(m.securities(), 0.0);
  for (std::size_t k = 0; k < m.securities(); ++k) {
    double eta = 0.0;
    for (const AgentSpec& a : m.agents) eta += a.endowment_weights[k];
    out.tilde_gamma[k] = out.gamma_market * (eta + m.net_supply[k]);
  }
  return out;
}

std::vector<std::vector<double>> optimal_strategies(const MarketSpec& m) {
  m.validate();
  const std::size_t k = m.securities();
  double inv = 0.0;
  for (const AgentSpec& a : m.agents) inv += 1.0 / a.risk_aversion;
  std::vector<double> total(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (const AgentSpec& a : m.agents) total[j] += a.endowment_weights[j];
    total[j] += m.net_supply[j];
  }
  // Share of agent a is (1/gamma_a) / sum(1/gamma_b); the last agent takes
  // the residual so that holdings clear exactly in floating point.
  std::vector<std::vector<double>> out(m.agents.size(), std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    double assigned = 0.0;
    for (std::size_t a = 0; a + 1 < m.agents.size(); ++a) {
      const double share = (1.0 / m.agents[a].risk_aversion) / inv;
      out[a][j] = share * total[j] - m.agents[a].endowment_weights[j];
      assigned += out[a][j];
    }
    out.back()[j] = m.net_supply[j] - assigned;
  }
  return out;
}

double pricing_weight(const std::vector<double>& tilde_gamma,
                      const std::vector<double>& terminal_payoff) {
  require(tilde_gamma.size() == terminal_payoff.size(), ErrorKind::InvalidArgument,
          "pricing_weight: payoff length must equal the number of securities");
  double e = 0.0;
  for (std::size_t k = 0; k < tilde_gamma.size(); ++k) {
    if (tilde_gamma[k] != 0.0) e -= tilde_gamma[k] * terminal_payoff[k];
  }
  if (!(std::abs(e) <= kWeightExponentBound)) {
    std::ostringstream os;
    os << "pricing_weight: exponent " << e << " outside +-" << kWeightExponentBound;
    fail(ErrorKind::Overflow, os.str());
  }
  return std::exp(e);
}

double pricing_weight(const MarketSpec& m, const std::vector<double>& terminal_payoff) {
  return pricing_weight(adjusted_risk_aversion(m).tilde_gamma, terminal_payoff);
}

MarketSpec single_agent_market(double gamma, const std::vector<double>& call_strikes,
                               bool include_stock, double horizon) {
  MarketSpec m;
  AgentSpec a;
  a.risk_aversion = gamma;
  if (include_stock) m.payoffs.emplace_back(LinearPayoff{});
  for (double k : call_strikes) m.payoffs.emplace_back(CallPayoff{k});
  a.endowment_weights.assign(m.payoffs.size(), 0.0);
  m.agents.push_back(a);
  m.net_supply.assign(m.payoffs.size(), 1.0);
  m.horizon = horizon;
  return m;
}

}  // namespace eqcapm

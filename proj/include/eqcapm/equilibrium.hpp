#pragma once

#include <variant>
#include <vector>

namespace eqcapm {

/// Exponential-utility agent with endowment H = c + eta . S_T.
struct AgentSpec {
  double risk_aversion = 1.0;
  double endowment_constant = 0.0;  // never affects prices
  std::vector<double> endowment_weights;
};

struct LinearPayoff {};
struct CallPayoff {
  double strike = 0.0;
};
using PayoffDescriptor = std::variant<LinearPayoff, CallPayoff>;

double evaluate_payoff(const PayoffDescriptor& f, double x);

struct MarketSpec {
  std::vector<AgentSpec> agents;
  std::vector<double> net_supply;
  std::vector<PayoffDescriptor> payoffs;
  double horizon = 0.0;

  std::size_t securities() const { return payoffs.size(); }
  void validate() const;
};

struct AdjustedRiskAversion {
  double gamma_market = 0.0;
  std::vector<double> tilde_gamma;
};

AdjustedRiskAversion adjusted_risk_aversion(const MarketSpec& m);

/// Constant equilibrium holdings per agent; they sum to the net supply.
std::vector<std::vector<double>> optimal_strategies(const MarketSpec& m);

/// Unnormalized Q-density exp(-tilde_gamma . payoff).
double pricing_weight(const MarketSpec& m, const std::vector<double>& terminal_payoff);
double pricing_weight(const std::vector<double>& tilde_gamma,
                      const std::vector<double>& terminal_payoff);

inline constexpr double kWeightExponentBound = 700.0;

/// Stock plus calls on the same factor, every security in the same
/// supply-adjusted position: tilde_gamma = gamma for each of them.
MarketSpec single_agent_market(double gamma, const std::vector<double>& call_strikes,
                               bool include_stock = true, double horizon = 0.0);

}  // namespace eqcapm

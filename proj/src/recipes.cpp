#include "eqcapm/recipes.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

#include "eqcapm/equilibrium.hpp"
#include "eqcapm/error.hpp"
#include "eqcapm/fourier_pricer.hpp"
#include "eqcapm/info_based.hpp"
#include "eqcapm/mc_oracle.hpp"

namespace eqcapm::recipes {

namespace fs = std::filesystem;
using config::json;

namespace {

constexpr std::size_t kDefaultOraclePaths = 100000;

class Csv {
 public:
  Csv(const RunOptions& opt, const std::string& name, const std::vector<std::string>& header)
      : out_((fs::path(opt.out_dir) / name).string(), std::ios::binary) {
    if (!out_) fail(ErrorKind::ConfigError, "cannot write '" + name + "' in " + opt.out_dir);
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string cell(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ';';
  }
  return s;
}

std::string num(double x) { return format_number(x); }

void write_json(const RunOptions& opt, const std::string& name, const json& j) {
  std::ofstream out((fs::path(opt.out_dir) / name).string(), std::ios::binary);
  if (!out) fail(ErrorKind::ConfigError, "cannot write '" + name + "' in " + opt.out_dir);
  out << j.dump(2) << '\n';
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

QuadratureConfig quad_for(const RunOptions& opt, double fallback) {
  QuadratureConfig q;
  q.rel_tol = opt.tol.value_or(fallback);
  return q;
}

std::shared_ptr<const AffineModel> make_model(const json& model, const std::string& where) {
  const std::string type = config::text_or(model, "type", "", where);
  if (type == "heston") return std::make_shared<heston::HestonModel>(config::heston_params(model, where));
  if (type == "oujump") return std::make_shared<oujump::OUJumpModel>(config::oujump_params(model, where));
  fail(ErrorKind::ConfigError, "config " + where + ": type must be 'heston' or 'oujump'");
}

std::vector<double> strikes_or_empty(const json& cfg, const char* key) {
  return cfg.contains(key) ? config::numbers(cfg, key, "") : std::vector<double>{};
}

// Rows shared by the two price recipes: jointly priced stock plus calls and
// zero-supply calls.
void option_rows(Csv& csv, const AffineModel& model, double gamma, double T, double t,
                 const std::vector<double>& state, const std::vector<double>& strikes,
                 const std::vector<double>& zero_supply, const QuadratureConfig& quad,
                 json& summary) {
  if (!strikes.empty()) {
    const MarketSpec m = single_agent_market(gamma, strikes, true, T);
    const PricingProblem pb = PricingProblem::from_market(m);
    const PriceResult r = price_ratio(model, pb, default_damping(pb), quad, t, state);
    csv.row({"stock", "", "ratio", num(r.prices[0]), num(r.abs_error[0])});
    json calls = json::array();
    for (std::size_t k = 0; k < strikes.size(); ++k) {
      csv.row({"call", num(strikes[k]), "ratio", num(r.prices[k + 1]), num(r.abs_error[k + 1])});
      calls.push_back({{"strike", strikes[k]}, {"price", r.prices[k + 1]}});
    }
    summary["with_calls"] = {{"stock", r.prices[0]}, {"calls", calls}};
  }
  json zs = json::array();
  for (double K : zero_supply) {
    const double c = price_zero_supply_option(model, gamma, K, T, quad, t, state);
    csv.row({"zero_supply_call", num(K), "shifted_transform", num(c), ""});
    zs.push_back({{"strike", K}, {"price", c}});
  }
  if (!zero_supply.empty()) summary["zero_supply_calls"] = zs;
}

std::vector<std::string> price_header() {
  return {"security", "strike", "method", "price", "abs_error"};
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

RunResult price_heston(const json& cfg, const RunOptions& opt) {
  config::check_root(cfg, {"model", "gamma", "T", "t", "state", "strikes", "zero_supply_strikes"});
  const heston::HestonParams p = config::heston_params(cfg.at("model"), "model");
  const double gamma = config::number(cfg, "gamma", "");
  const double T = config::number(cfg, "T", "");
  const double t = config::number_or(cfg, "t", 0.0, "");
  std::vector<double> state{p.v0, p.x0};
  if (cfg.contains("state")) {
    config::check_keys(cfg.at("state"), {"V", "X"}, "state");
    state = {config::number(cfg.at("state"), "V", "state"),
             config::number(cfg.at("state"), "X", "state")};
  }
  const heston::HestonModel model(p);
  RunResult res;
  Csv csv(opt, "prices.csv", price_header());
  const double closed = heston::equilibrium_price(p, gamma, T, t, state[0], state[1]);
  const double special = price_linear_special(model, gamma, T, t, state);
  csv.row({"stock", "", "closed_form", num(closed), ""});
  csv.row({"stock", "", "fourier_special", num(special), ""});
  res.summary = {{"stock_closed_form", closed}, {"stock_fourier_special", special}};
  option_rows(csv, model, gamma, T, t, state, strikes_or_empty(cfg, "strikes"),
              strikes_or_empty(cfg, "zero_supply_strikes"), quad_for(opt, 1e-9), res.summary);
  res.files.push_back("prices.csv");
  return res;
}

RunResult price_oujump(const json& cfg, const RunOptions& opt) {
  config::check_root(cfg,
                     {"model", "gamma_tilde", "T", "t", "state", "strikes", "zero_supply_strikes"});
  const oujump::OUJumpParams p = config::oujump_params(cfg.at("model"), "model");
  const double g = config::number(cfg, "gamma_tilde", "");
  const double T = config::number(cfg, "T", "");
  const double t = config::number_or(cfg, "t", 0.0, "");
  std::vector<double> state{p.x0};
  if (cfg.contains("state")) {
    config::check_keys(cfg.at("state"), {"X"}, "state");
    state = {config::number(cfg.at("state"), "X", "state")};
  }
  const oujump::OUJumpModel model(p);
  RunResult res;
  Csv csv(opt, "prices.csv", price_header());
  const double closed = oujump::equilibrium_price(p, g, T, t, state[0]);
  const double special = price_linear_special(model, g, T, t, state);
  csv.row({"stock", "", "closed_form", num(closed), ""});
  csv.row({"stock", "", "fourier_special", num(special), ""});
  res.summary = {{"stock_closed_form", closed}, {"stock_fourier_special", special}};
  option_rows(csv, model, g, T, t, state, strikes_or_empty(cfg, "strikes"),
              strikes_or_empty(cfg, "zero_supply_strikes"), quad_for(opt, kDefaultSmileTol),
              res.summary);
  res.files.push_back("prices.csv");
  return res;
}

std::vector<Smile> compute_smiles(const json& cfg, double tol) {
  config::check_root(cfg, {"model", "gamma", "T", "t", "strikes", "n_strikes", "sweep",
                           "convention"});
  const json& base_model = cfg.at("model");
  const auto base = make_model(base_model, "model");
  const double gamma = config::number(cfg, "gamma", "");
  const double T = config::number(cfg, "T", "");
  const double t = config::number_or(cfg, "t", 0.0, "");
  const std::string conv_name = config::text_or(cfg, "convention", "lognormal", "");
  if (conv_name != "lognormal" && conv_name != "normal") {
    fail(ErrorKind::ConfigError, "config: convention must be 'lognormal' or 'normal'");
  }
  const VolConvention conv =
      conv_name == "normal" ? VolConvention::Normal : VolConvention::Lognormal;

  std::vector<double> strikes;
  if (cfg.contains("strikes")) {
    strikes = config::numbers(cfg, "strikes", "");
  } else {
    const double n = config::number_or(cfg, "n_strikes", 15.0, "");
    const TerminalMoments m = terminal_moments(*base, T, t, base->initial_state());
    strikes = default_strike_grid(m.mean, m.sd, static_cast<std::size_t>(n));
  }

  // Sweep: one parameter with scalar values, or several with value tuples.
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  if (cfg.contains("sweep")) {
    const json& sw = cfg.at("sweep");
    config::check_keys(sw, {"parameter", "parameters", "values"}, "sweep");
    if (sw.contains("parameter")) {
      names.push_back(config::text_or(sw, "parameter", "", "sweep"));
      for (double v : config::numbers(sw, "values", "sweep")) values.push_back({v});
    } else {
      if (!sw.contains("parameters") || !sw.at("parameters").is_array()) {
        fail(ErrorKind::ConfigError, "config sweep: need 'parameter' or 'parameters'");
      }
      for (const json& nm : sw.at("parameters")) names.push_back(nm.get<std::string>());
      for (const json& tuple : sw.at("values")) {
        std::vector<double> v = tuple.get<std::vector<double>>();
        if (v.size() != names.size()) {
          fail(ErrorKind::ConfigError, "config sweep: value tuple size mismatch");
        }
        values.push_back(v);
      }
    }
    for (const std::string& nm : names) {
      if (nm != "gamma" && (nm == "type" || !base_model.contains(nm))) {
        fail(ErrorKind::ConfigError, "config sweep: unknown parameter '" + nm + "'");
      }
    }
  } else {
    names.push_back("gamma");
    values.push_back({gamma});
  }

  std::vector<double> labels;
  for (const auto& v : values) labels.push_back(v.front());
  std::size_t idx = 0;
  return smile_sweep(
      [&](double) {
        const std::vector<double>& v = values[idx++];
        json model = base_model;
        SmileSetup s;
        s.gamma = gamma;
        for (std::size_t j = 0; j < names.size(); ++j) {
          if (names[j] == "gamma") {
            s.gamma = v[j];
          } else {
            model[names[j]] = v[j];
          }
        }
        s.model = make_model(model, "sweep");
        s.T = T;
        s.t = t;
        s.strikes = strikes;
        s.quad.rel_tol = tol;
        s.convention = conv;
        return s;
      },
      labels);
}

RunResult smile(const json& cfg, const RunOptions& opt) {
  const std::vector<Smile> smiles = compute_smiles(cfg, opt.tol.value_or(kDefaultSmileTol));
  Csv csv(opt, "smile.csv",
          {"sweep_value", "strike", "call_price", "implied_vol", "spot", "status"});
  RunResult res;
  json summary = json::array();
  for (const Smile& s : smiles) {
    int ok = 0;
    for (const SmilePoint& p : s.points) {
      csv.row({num(s.sweep_value), num(p.strike), num(p.call_price),
               num(p.implied_vol.value_or(std::nan(""))), num(s.spot),
               p.error.empty() ? "ok" : cell(p.error)});
      ok += p.implied_vol ? 1 : 0;
    }
    summary.push_back({{"sweep_value", s.sweep_value}, {"spot", s.spot}, {"inverted", ok}});
  }
  res.files.push_back("smile.csv");
  res.summary = {{"smiles", summary}};
  return res;
}

RunResult info_bond(const json& cfg, const RunOptions& opt) {
  config::check_root(cfg, {"p1", "x1", "sigma", "gamma_tilde", "T", "time_grid", "scenarios"});
  const double p1 = config::number(cfg, "p1", "");
  const double x1 = config::number_or(cfg, "x1", 1.0, "");
  const double T = config::number(cfg, "T", "");
  const std::vector<double> sigmas = config::numbers(cfg, "sigma", "");
  const std::vector<double> gammas = config::numbers(cfg, "gamma_tilde", "");
  const std::vector<double> grid = config::time_grid(cfg.at("time_grid"), "time_grid");
  if (!cfg.contains("scenarios") || !cfg.at("scenarios").is_array()) {
    fail(ErrorKind::ConfigError, "config: 'scenarios' must be an array");
  }
  Csv csv(opt, "bond.csv",
          {"scenario", "sigma", "gamma_tilde", "t", "xi", "price", "posterior_p1"});
  RunResult res;
  json summary = json::array();
  std::uint64_t stream = 0;
  for (const json& sc : cfg.at("scenarios")) {
    config::check_keys(sc, {"label", "X"}, "scenarios");
    const std::string label = config::text_or(sc, "label", "scenario", "scenarios");
    const double X = config::number(sc, "X", "scenarios");
    for (double sigma : sigmas) {
      for (double g : gammas) {
        const info::InfoModelSpec spec = info::InfoModelSpec::single(
            info::DiscretePrior{{0.0, x1}, {1.0 - p1, p1}}, sigma, T, g);
        // Same stream for every (sigma, gamma): the curves share their noise.
        const std::vector<double> x{X};
        const auto path = info::simulate_information_paths(spec, x, grid, opt.seed, stream);
        double last = 0.0;
        for (const info::InfoPathState& st : path) {
          const double s = info::binary_bond_price(spec, st);
          const info::ConditionalDensity d = info::conditional_density(spec, 0, st);
          csv.row({cell(label), num(sigma), num(g), num(st.t), num(st.xi[0]), num(s),
                   num(d.weights[1])});
          last = s;
        }
        summary.push_back({{"scenario", label}, {"sigma", sigma}, {"gamma_tilde", g},
                           {"final_price", last}});
      }
    }
    ++stream;
  }
  res.files.push_back("bond.csv");
  res.summary = {{"paths", summary}};
  return res;
}

RunResult info_exponential(const json& cfg, const RunOptions& opt) {
  config::check_root(cfg, {"kappa", "sigma", "T", "gamma_tilde", "time_grid", "X"});
  const double kappa = config::number(cfg, "kappa", "");
  const double sigma = config::number(cfg, "sigma", "");
  const double T = config::number(cfg, "T", "");
  const double g = config::number(cfg, "gamma_tilde", "");
  const std::vector<double> grid = config::time_grid(cfg.at("time_grid"), "time_grid");
  const info::InfoModelSpec spec =
      info::InfoModelSpec::single(info::ExponentialPrior{kappa}, sigma, T, g);
  double X = 0.0;
  if (cfg.contains("X")) {
    X = config::number(cfg, "X", "");
  } else {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed),
                      static_cast<std::uint32_t>(opt.seed >> 32), 99u};
    std::mt19937_64 rng(seq);
    X = info::sample_prior(spec.factors.front().prior, rng);
  }
  const std::vector<double> x{X};
  const auto path = info::simulate_information_paths(spec, x, grid, opt.seed, 0);
  Csv csv(opt, "exponential.csv", {"t", "xi", "price", "filter_mean", "var_q"});
  double last = 0.0;
  for (const info::InfoPathState& st : path) {
    const info::FactorMoments q = info::posterior_moments(spec, st, g);
    const double s = st.t > 0.0 ? info::exponential_price(spec, st) : q.mean;
    const double m = info::posterior_moments(spec, st, 0.0).mean;
    csv.row({num(st.t), num(st.xi[0]), num(s), num(m), num(q.variance)});
    last = s;
  }
  RunResult res;
  res.files.push_back("exponential.csv");
  res.summary = {{"X", X}, {"final_price", last}};
  return res;
}

RunResult oracle(const json& cfg, const RunOptions& opt) {
  config::check_root(cfg, {"model", "gamma", "T", "n_steps", "t", "xi"});
  const json& model = cfg.at("model");
  const std::string type = config::text_or(model, "type", "", "model");
  const std::size_t n = opt.paths.value_or(kDefaultOraclePaths);
  const double g = config::number(cfg, "gamma", "");
  json out;
  if (type == "heston") {
    const heston::HestonParams p = config::heston_params(model, "model");
    const double T = config::number(cfg, "T", "");
    const double steps = config::number_or(cfg, "n_steps", std::ceil(200.0 * T), "");
    const mc::HestonOracle o =
        mc::heston_stock_oracle(p, g, T, n, static_cast<std::size_t>(steps), opt.seed);
    out = {{"value", o.estimate.value},
           {"std_error", o.estimate.std_error},
           {"n_paths", n},
           {"seed", opt.seed},
           {"closed_form", heston::equilibrium_price(p, g, T, 0.0, p.v0, p.x0)},
           {"value_double_steps", o.halved.value},
           {"bias_ok", o.bias_ok},
           {"max_weight_share", o.estimate.max_weight_share},
           {"weight_concentrated", o.estimate.weight_concentrated}};
  } else if (type == "oujump") {
    const oujump::OUJumpParams p = config::oujump_params(model, "model");
    const double T = config::number(cfg, "T", "");
    const mc::OracleEstimate e = mc::oujump_stock_oracle(p, g, T, n, opt.seed);
    out = {{"value", e.value},
           {"std_error", e.std_error},
           {"n_paths", n},
           {"seed", opt.seed},
           {"closed_form", oujump::equilibrium_price(p, g, T, 0.0, p.x0)},
           {"max_weight_share", e.max_weight_share},
           {"weight_concentrated", e.weight_concentrated}};
  } else if (type == "info") {
    config::check_keys(model, {"type", "prior", "sigma", "T"}, "model");
    const json& pr = model.at("prior");
    const std::string ptype = config::text_or(pr, "type", "", "model.prior");
    info::Prior prior;
    if (ptype == "binary") {
      config::check_keys(pr, {"type", "p1", "x1"}, "model.prior");
      const double p1 = config::number(pr, "p1", "model.prior");
      prior = info::DiscretePrior{{0.0, config::number_or(pr, "x1", 1.0, "model.prior")},
                                  {1.0 - p1, p1}};
    } else if (ptype == "exponential") {
      config::check_keys(pr, {"type", "kappa"}, "model.prior");
      prior = info::ExponentialPrior{config::number(pr, "kappa", "model.prior")};
    } else {
      fail(ErrorKind::ConfigError, "config model.prior: type must be 'binary' or 'exponential'");
    }
    const info::InfoModelSpec spec = info::InfoModelSpec::single(
        prior, config::number(model, "sigma", "model"), config::number(model, "T", "model"), g);
    const info::InfoPathState st{config::number_or(cfg, "t", 0.0, ""),
                                 {config::number_or(cfg, "xi", 0.0, "")}};
    const mc::OracleEstimate e = mc::info_oracle(spec, st, n, opt.seed).front();
    out = {{"value", e.value},
           {"std_error", e.std_error},
           {"n_paths", n},
           {"seed", opt.seed},
           {"closed_form", info::price(spec, st).front()},
           {"max_weight_share", e.max_weight_share},
           {"weight_concentrated", e.weight_concentrated}};
  } else {
    fail(ErrorKind::ConfigError, "config model: type must be 'heston', 'oujump' or 'info'");
  }
  write_json(opt, "oracle.json", out);
  RunResult res;
  res.files.push_back("oracle.json");
  res.summary = out;
  return res;
}

json figure_config(const std::string& id) {
  const json heston_model = {{"type", "heston"}, {"mu", 0.1},    {"kappa", 0.006}, {"lambda", 0.2},
                             {"sigma", 0.3},     {"v0", 0.03},   {"x0", 1.0}};
  const json ou_model = {{"type", "oujump"}, {"lambda", 2.0}, {"mu", 1.0},
                         {"kappa", 30.0},    {"theta", 30.0}, {"x0", 1.0}};
  const json bond_grid = {{"start", 0.0}, {"stop", 4.9}, {"steps", 490}};
  const json scenarios = json::array({{{"label", "no_default"}, {"X", 1.0}},
                                      {{"label", "default"}, {"X", 0.0}}});
  if (id == "1") {
    return {{"schema_version", config::kSchemaVersion}, {"model", heston_model}, {"gamma", 0.2},
            {"T", 0.5}, {"n_strikes", 15},
            {"sweep", {{"parameter", "gamma"}, {"values", {0.05, 0.1, 0.2, 0.4}}}}};
  }
  if (id == "2") {
    return {{"schema_version", config::kSchemaVersion}, {"model", heston_model}, {"gamma", 0.2},
            {"T", 0.5}, {"n_strikes", 15},
            {"sweep", {{"parameter", "sigma"}, {"values", {0.1, 0.4}}}}};
  }
  if (id == "3") {
    return {{"schema_version", config::kSchemaVersion}, {"model", ou_model}, {"gamma", 0.2},
            {"T", 0.1}, {"n_strikes", 15},
            {"sweep",
             {{"parameters", {"kappa", "theta"}}, {"values", {{20.0, 20.0}, {30.0, 30.0}}}}}};
  }
  if (id == "3a") {
    return {{"schema_version", config::kSchemaVersion}, {"model", ou_model}, {"gamma", 0.2},
            {"T", 0.1}, {"n_strikes", 15},
            {"sweep", {{"parameter", "gamma"}, {"values", {0.05, 0.1, 0.2, 0.4}}}}};
  }
  if (id == "4") {
    return {{"schema_version", config::kSchemaVersion}, {"p1", 0.8}, {"x1", 1.0},
            {"sigma", {0.1, 1.0}}, {"gamma_tilde", {0.6}}, {"T", 5.0},
            {"time_grid", bond_grid}, {"scenarios", scenarios}};
  }
  if (id == "5") {
    return {{"schema_version", config::kSchemaVersion}, {"p1", 0.8}, {"x1", 1.0},
            {"sigma", {0.2, 0.5}}, {"gamma_tilde", {0.2, 0.8}}, {"T", 5.0},
            {"time_grid", bond_grid}, {"scenarios", scenarios}};
  }
  fail(ErrorKind::ConfigError, "figure: unknown id '" + id + "' (expected 1, 2, 3, 3a, 4, 5)");
}

RunResult figure(const std::string& id, const RunOptions& opt) {
  const json cfg = figure_config(id);
  write_json(opt, "config.json", cfg);
  RunResult res = (id == "4" || id == "5") ? info_bond(cfg, opt) : smile(cfg, opt);
  res.files.insert(res.files.begin(), "config.json");
  return res;
}

RunResult run(const std::string& subcommand, const std::string& figure_id,
              const RunOptions& opt) {
  fs::create_directories(opt.out_dir);
  RunResult res;
  std::string recipe = subcommand;
  if (subcommand == "figure") {
    res = figure(figure_id, opt);
    recipe += " " + figure_id;
  } else {
    if (opt.config_path.empty()) {
      fail(ErrorKind::ConfigError, subcommand + ": --config is required");
    }
    const json cfg = config::load(opt.config_path);
    if (subcommand == "price-heston") {
      res = price_heston(cfg, opt);
    } else if (subcommand == "price-oujump") {
      res = price_oujump(cfg, opt);
    } else if (subcommand == "smile") {
      res = smile(cfg, opt);
    } else if (subcommand == "info-bond") {
      res = info_bond(cfg, opt);
    } else if (subcommand == "info-exponential") {
      res = info_exponential(cfg, opt);
    } else if (subcommand == "oracle") {
      res = oracle(cfg, opt);
    } else {
      fail(ErrorKind::ConfigError, "unknown subcommand '" + subcommand + "'");
    }
  }
  json manifest = {{"recipe", recipe},
                   {"config_path", opt.config_path},
                   {"output_dir", opt.out_dir},
                   {"seed", opt.seed},
                   {"tool_version", kToolVersion},
                   {"timestamp", utc_timestamp()},
                   {"files", res.files}};
  if (opt.paths) manifest["paths"] = *opt.paths;
  if (opt.tol) manifest["tol"] = *opt.tol;
  write_json(opt, "manifest.json", manifest);
  res.files.push_back("manifest.json");
  return res;
}

}  // namespace eqcapm::recipes

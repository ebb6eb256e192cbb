// eqcapm: equilibrium pricing recipes from the command line.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqcapm/error.hpp"
#include "eqcapm/recipes.hpp"

namespace {

int report(const std::string& error, const std::string& kind, const std::string& message) {
  nlohmann::json j = {{"error", error}, {"kind", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return error == "ConfigError" ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium prices, implied-vol smiles and Monte Carlo checks"};
  app.require_subcommand(1);

  eqcapm::recipes::RunOptions opt;
  std::uint64_t seed = eqcapm::recipes::kDefaultSeed;
  std::size_t paths = 0;
  double tol = 0.0;
  std::string figure_id;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config_path, "JSON configuration");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--paths", paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
  };

  for (const char* name : {"price-heston", "price-oujump", "smile", "info-bond",
                           "info-exponential", "oracle"}) {
    common(app.add_subcommand(name, std::string("run the ") + name + " recipe"), true);
  }
  auto* fig = app.add_subcommand("figure", "write the data behind a built-in figure");
  fig->add_option("id", figure_id, "1, 2, 3, 3a, 4 or 5")
      ->required()
      ->check(CLI::IsMember({"1", "2", "3", "3a", "4", "5"}));
  common(fig, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("ConfigError", "ConfigError", e.what());
  }

  opt.seed = seed;
  if (paths > 0) opt.paths = paths;
  if (tol > 0.0) opt.tol = tol;
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    const auto res = eqcapm::recipes::run(sub, figure_id, opt);
    std::cout << res.summary.dump(2) << '\n';
  } catch (const eqcapm::Error& e) {
    const std::string kind(eqcapm::to_string(e.kind()));
    return report(e.kind() == eqcapm::ErrorKind::ConfigError ? "ConfigError" : "PricingError",
                  kind, sub + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    return report("ConfigError", "ConfigError", sub + ": " + e.what());
  } catch (const std::exception& e) {
    return report("PricingError", "PricingError", sub + ": " + e.what());
  }
  return 0;
}

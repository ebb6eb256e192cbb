#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("eqcapm_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + EQCAPM_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

json heston_model() {
  return {{"type", "heston"}, {"mu", 0.1},  {"kappa", 0.006}, {"lambda", 0.2},
          {"sigma", 0.3},     {"v0", 0.03}, {"x0", 1.0}};
}

}  // namespace

TEST_CASE("price-heston writes prices and a manifest") {
  const fs::path d = scratch("price");
  const json cfg = {{"schema_version", 1}, {"model", heston_model()}, {"gamma", 0.2},
                    {"T", 0.5},            {"strikes", {1.0, 1.1}},  {"zero_supply_strikes", {1.05}}};
  const Run r = cli("price-heston --config \"" + write_config(d, cfg).string() + "\" --out \"" +
                        (d / "out").string() + "\"",
                    d);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).is_object());
  const std::string csv = slurp(d / "out" / "prices.csv");
  CHECK(csv.rfind("security,strike,method,price,abs_error", 0) == 0);
  CHECK(csv.find("closed_form") != std::string::npos);
  CHECK(csv.find("shifted_transform") != std::string::npos);
  const json man = json::parse(slurp(d / "out" / "manifest.json"));
  CHECK(man.at("recipe") == "price-heston");
  CHECK(man.contains("timestamp"));
  CHECK(man.at("files").size() == 1);
}

TEST_CASE("configuration errors are reported as JSON with exit code 2") {
  const fs::path d = scratch("config");
  json cfg = {{"schema_version", 1}, {"model", heston_model()}, {"gamma", 0.2}, {"T", 0.5},
              {"strikes", {1.0}},    {"bogus", 1}};
  Run r = cli("price-heston --config \"" + write_config(d, cfg).string() + "\" --out \"" +
                  d.string() + "\"",
              d);
  CHECK(r.code == 2);
  json e = json::parse(r.err);
  CHECK(e.at("error") == "ConfigError");
  CHECK(e.at("message").get<std::string>().find("bogus") != std::string::npos);

  cfg.erase("bogus");
  cfg.erase("schema_version");
  r = cli("price-heston --config \"" + write_config(d, cfg).string() + "\"", d);
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).at("message").get<std::string>().find("schema_version") !=
        std::string::npos);

  cfg["schema_version"] = 1;
  cfg["model"]["extra"] = 3;
  r = cli("price-heston --config \"" + write_config(d, cfg).string() + "\"", d);
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).at("message").get<std::string>().find("model") != std::string::npos);

  r = cli("price-heston --config \"" + (d / "missing.json").string() + "\"", d);
  CHECK(r.code == 2);
  r = cli("figure 9", d);
  CHECK(r.code == 2);
}

TEST_CASE("pricing errors are reported with exit code 3") {
  const fs::path d = scratch("pricing");
  const json cfg = {{"schema_version", 1}, {"model", heston_model()}, {"gamma", 1.0}, {"T", 25.0}};
  const Run r = cli("price-heston --config \"" + write_config(d, cfg).string() + "\" --out \"" +
                        d.string() + "\"",
                    d);
  CHECK(r.code == 3);
  const json e = json::parse(r.err);
  CHECK(e.at("error") == "PricingError");
  CHECK(e.at("kind") == "HorizonExceeded");
}

TEST_CASE("oracle runs are reproducible for a fixed seed") {
  const fs::path d = scratch("oracle");
  const json cfg = {{"schema_version", 1},
                    {"model", {{"type", "oujump"}, {"lambda", 2.0}, {"mu", 1.0}, {"kappa", 30.0},
                               {"theta", 30.0}, {"x0", 1.0}}},
                    {"gamma", 0.2},
                    {"T", 0.1}};
  const std::string c = write_config(d, cfg).string();
  auto run = [&](const std::string& out, int seed) {
    return cli("oracle --config \"" + c + "\" --paths 50000 --seed " + std::to_string(seed) +
                   " --out \"" + (d / out).string() + "\"",
               d);
  };
  REQUIRE(run("a", 5).code == 0);
  REQUIRE(run("b", 5).code == 0);
  REQUIRE(run("c", 6).code == 0);
  const std::string a = slurp(d / "a" / "oracle.json");
  CHECK(a == slurp(d / "b" / "oracle.json"));
  CHECK(a != slurp(d / "c" / "oracle.json"));
  const json j = json::parse(a);
  CHECK(j.at("n_paths") == 50000);
  CHECK(std::abs(j.at("value").get<double>() - j.at("closed_form").get<double>()) <
        3.0 * j.at("std_error").get<double>());
}

TEST_CASE("figure recipe writes its configuration and data") {
  const fs::path d = scratch("figure");
  const Run r = cli("figure 5 --out \"" + d.string() + "\"", d);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(d / "config.json"));
  CHECK(fs::exists(d / "bond.csv"));
  const json cfg = json::parse(slurp(d / "config.json"));
  CHECK(cfg.at("schema_version") == 1);
  const std::string bond = slurp(d / "bond.csv");
  CHECK(bond.rfind("scenario,sigma,gamma_tilde,t,xi,price,posterior_p1", 0) == 0);

  // the stored configuration replays through the generic recipe
  const fs::path e = scratch("figure_replay");
  const Run again = cli("info-bond --config \"" + (d / "config.json").string() + "\" --out \"" +
                            e.string() + "\"",
                        e);
  REQUIRE(again.code == 0);
  CHECK(slurp(e / "bond.csv") == bond);
}

#include "eqcapm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "eqcapm/error.hpp"

namespace eqcapm::config {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::ConfigError, "config " + where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) bad(where, std::string("missing key '") + key + "'");
  return obj.at(key);
}

}  // namespace

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, "config: '" + path + "' is not valid JSON: " + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) bad(where, "unknown key '" + key + "'");
  }
}

void check_root(const json& root, std::initializer_list<const char*> allowed) {
  if (!root.is_object()) bad("", "top level must be an object");
  if (!root.contains("schema_version")) bad("", "missing schema_version");
  const json& v = root.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    bad("", "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  for (const auto& [key, value] : root.items()) {
    bool known = key == "schema_version";
    for (const char* a : allowed) known = known || key == a;
    if (!known) bad("", "unknown key '" + key + "'");
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) bad(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) bad(where, std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) bad(where, std::string("'") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string text_or(const json& obj, const char* key, const std::string& fallback,
                    const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) bad(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

heston::HestonParams heston_params(const json& model, const std::string& where) {
  check_keys(model, {"type", "mu", "kappa", "lambda", "sigma", "v0", "x0"}, where);
  heston::HestonParams p;
  p.mu = number(model, "mu", where);
  p.kappa = number(model, "kappa", where);
  p.lambda = number(model, "lambda", where);
  p.sigma = number(model, "sigma", where);
  p.v0 = number(model, "v0", where);
  p.x0 = number(model, "x0", where);
  try {
    p.validate();
  } catch (const Error& e) {
    bad(where, e.what());
  }
  return p;
}

oujump::OUJumpParams oujump_params(const json& model, const std::string& where) {
  check_keys(model, {"type", "lambda", "mu", "kappa", "theta", "x0"}, where);
  oujump::OUJumpParams p;
  p.lambda = number(model, "lambda", where);
  p.mu = number(model, "mu", where);
  p.kappa = number(model, "kappa", where);
  p.theta = number(model, "theta", where);
  p.x0 = number(model, "x0", where);
  try {
    p.validate();
  } catch (const Error& e) {
    bad(where, e.what());
  }
  return p;
}

std::vector<double> time_grid(const json& grid, const std::string& where) {
  check_keys(grid, {"start", "stop", "steps"}, where);
  const double a = number(grid, "start", where);
  const double b = number(grid, "stop", where);
  const double n = number(grid, "steps", where);
  if (!(n >= 1.0 && n == std::floor(n) && b > a)) bad(where, "need stop > start and steps >= 1");
  const auto steps = static_cast<std::size_t>(n);
  std::vector<double> out(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(steps);
  }
  return out;
}

}  // namespace eqcapm::config

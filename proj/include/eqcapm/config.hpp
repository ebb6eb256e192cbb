#pragma once

// JSON run configurations. Every object is checked against its allowed keys
// and any mismatch raises ConfigError naming the offending path.

#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqcapm/heston.hpp"
#include "eqcapm/oujump.hpp"

namespace eqcapm::config {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json load(const std::string& path);

/// Rejects unknown keys and a missing or unsupported schema_version at the top level.
void check_root(const json& root, std::initializer_list<const char*> allowed);
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where);

double number(const json& obj, const char* key, const std::string& where);
double number_or(const json& obj, const char* key, double fallback, const std::string& where);
std::vector<double> numbers(const json& obj, const char* key, const std::string& where);
std::string text_or(const json& obj, const char* key, const std::string& fallback,
                    const std::string& where);

/// {"type": "heston", mu, kappa, lambda, sigma, v0, x0}
heston::HestonParams heston_params(const json& model, const std::string& where);
/// {"type": "oujump", lambda, mu, kappa, theta, x0}
oujump::OUJumpParams oujump_params(const json& model, const std::string& where);

/// {"start", "stop", "steps"} -> steps + 1 equally spaced points.
std::vector<double> time_grid(const json& grid, const std::string& where);

}  // namespace eqcapm::config

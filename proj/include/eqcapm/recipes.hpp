#pragma once

// Run recipes behind the command-line tool. Each writes its data files and a
// manifest.json into the output directory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqcapm/config.hpp"
#include "eqcapm/vol_surface.hpp"

namespace eqcapm::recipes {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240611;
inline constexpr double kDefaultSmileTol = 1e-7;

struct RunOptions {
  std::string config_path;  // empty for built-in figure recipes
  std::string out_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> paths;
  std::optional<double> tol;
};

struct RunResult {
  std::vector<std::string> files;  // relative to out_dir
  config::json summary;            // printed on stdout
};

RunResult price_heston(const config::json& cfg, const RunOptions& opt);
RunResult price_oujump(const config::json& cfg, const RunOptions& opt);
RunResult smile(const config::json& cfg, const RunOptions& opt);
RunResult info_bond(const config::json& cfg, const RunOptions& opt);
RunResult info_exponential(const config::json& cfg, const RunOptions& opt);
RunResult oracle(const config::json& cfg, const RunOptions& opt);

/// Built-in figure configuration: "1", "2", "3", "3a", "4", "5".
config::json figure_config(const std::string& id);
/// Writes config.json next to the figure data, then runs the smile or bond recipe.
RunResult figure(const std::string& id, const RunOptions& opt);

/// Smiles of a smile config without writing files.
std::vector<Smile> compute_smiles(const config::json& cfg, double tol);

/// Dispatch by subcommand name and write manifest.json.
RunResult run(const std::string& subcommand, const std::string& figure_id,
              const RunOptions& opt);

/// Fixed 12-significant-digit formatting, "nan" for NaN.
std::string format_number(double x);

}  // namespace eqcapm::recipes

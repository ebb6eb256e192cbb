#pragma once

// Seeded generators for the property tests.

#include <cmath>
#include <cstdint>
#include <random>

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  double normal() { return std::normal_distribution<double>()(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline bool rel_close(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= rel * std::abs(b) + abs;
}

}  // namespace testgen

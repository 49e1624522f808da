#pragma once

// Shared helpers for the unit suites: ulp-distance comparison and a
// deterministic uniform generator so property sweeps are reproducible.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>

namespace testutil {

inline std::int64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  if (std::isnan(a) || std::isnan(b)) return INT64_MAX;
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  if ((ia < 0) != (ib < 0)) return INT64_MAX;
  return std::abs(ia - ib);
}

inline bool within_ulps(double a, double b, std::int64_t n) { return ulp_distance(a, b) <= n; }

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 20250811u) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

 private:
  std::mt19937_64 gen_;
};

// Central finite difference of a scalar function.
template <class F>
double central_diff(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class F>
double central_diff2(F&& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace testutil

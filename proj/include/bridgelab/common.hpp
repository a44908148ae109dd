#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridgelab {

using Vec = std::vector<double>;

// Error categories map to process exit codes in the CLI:
// ConfigError -> 2, DivergenceError -> 3, IoError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(const Vec& v) { return dot(v, v); }

inline double norm(const Vec& v) { return std::sqrt(squared_norm(v)); }

inline double mean(const Vec& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population variance over the components of one vector.
inline double component_variance(const Vec& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// Cosine similarity with a zero-vector guard: either norm below the guard
// reports 0 rather than dividing by ~0.
inline double cosine_similarity(const Vec& a, const Vec& b, double guard = 1e-12) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na < guard || nb < guard) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace bridgelab

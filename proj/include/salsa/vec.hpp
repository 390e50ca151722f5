#pragma once

// Small dense-vector helpers on std::vector<double>. Everything in this
// toolkit works at "desk scale" (dimensions in the tens, horizons in the
// millions), so value-semantic vectors and straight loops are the right
// tool; no linear-algebra library is needed.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace salsa {

using Vec = std::vector<double>;

// Thrown when two vectors that must share a dimension do not. Dimension
// mismatches are programming errors, never data errors, so this is fatal.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

inline double dot(const Vec& a, const Vec& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

// y += a * x
inline void axpy(double a, const Vec& x, Vec& y) {
  require_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

}  // namespace salsa

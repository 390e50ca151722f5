#pragma once

// Deterministic random number generation. The engine is std::mt19937_64,
// but all variate transforms (uniform, normal, integer range) are written
// out here rather than taken from <random>'s distribution classes: the
// standard leaves distribution algorithms implementation-defined, and this
// toolkit promises that a (config, seed) pair reproduces runs byte for
// byte on any platform.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "salsa/vec.hpp"

namespace salsa {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired variate is cached so no
  // bits are wasted and the stream stays deterministic.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();  // avoid log(0)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;  // 2*pi*u2
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  void fill_normal(Vec& out) {
    for (double& v : out) v = normal();
  }

  // Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: n must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace salsa

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "rdlab/geometry.hpp"

namespace rdlab {

// Counter-based generator: one root seed, per-task streams derived from
// stable labels. Reproducible across platforms (no std::distribution use).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

  // Derive an independent stream for a named task.
  Rng stream(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (const char c : label) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 1099511628211ull;
    }
    Rng r(0);
    r.state_ = mix(state_ ^ h);
    return r;
  }

  Rng stream(std::string_view label, std::uint64_t index) const {
    Rng r = stream(label);
    r.state_ = mix(r.state_ + 0x165667b19e3779f9ull * (index + 1));
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t m) { return next_u64() % m; }

  double normal() {
    // Box-Muller; one value per call keeps the stream layout simple.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  VecN unit_direction(int n) {
    VecN v{};
    double s = 0.0;
    do {
      for (int i = 0; i < n; ++i) v[i] = normal();
      s = norm2(v, n);
    } while (s < 1e-24);
    const double inv = 1.0 / std::sqrt(s);
    for (int i = 0; i < n; ++i) v[i] *= inv;
    return v;
  }

  // Uniform in the closed ball B(center, radius).
  VecN in_ball(std::span<const double> center, double radius, int n) {
    const VecN dir = unit_direction(n);
    const double rho = radius * std::pow(uniform(), 1.0 / n);
    VecN v{};
    for (int i = 0; i < n; ++i) v[i] = center[i] + rho * dir[i];
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

// Deterministic low-discrepancy sequence (Halton), used by search routines
// that must behave identically under affine rescaling of the problem.
class Halton {
 public:
  explicit Halton(int dim, std::uint64_t start = 1) : dim_(dim), index_(start) {}

  VecN next() {
    static constexpr int bases[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19};
    VecN v{};
    for (int i = 0; i < dim_; ++i) v[i] = radical_inverse(index_, bases[i]);
    ++index_;
    return v;
  }

  // Next point in the unit ball, by rejection from the cube [-1,1]^dim.
  VecN next_in_unit_ball() {
    for (;;) {
      VecN v = next();
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        v[i] = 2.0 * v[i] - 1.0;
        s += v[i] * v[i];
      }
      if (s <= 1.0) return v;
    }
  }

 private:
  static double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
      f /= base;
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    return r;
  }

  int dim_;
  std::uint64_t index_;
};

}  // namespace rdlab

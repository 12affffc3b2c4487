#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace rdlab {

// Ambient dimensions are small (2..8); fixed-capacity vectors avoid heap
// traffic in the kernel summation loops.
inline constexpr int kMaxDim = 8;

using VecN = std::array<double, kMaxDim>;
using MatN = std::array<double, kMaxDim * kMaxDim>;  // row-major n*n block

inline VecN zero_vec() {
  VecN v{};
  return v;
}

inline VecN make_vec(std::span<const double> x) {
  VecN v{};
  for (std::size_t i = 0; i < x.size() && i < kMaxDim; ++i) v[i] = x[i];
  return v;
}

inline double dot(const VecN& a, const VecN& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const VecN& a, int n) { return dot(a, a, n); }
inline double norm(const VecN& a, int n) { return std::sqrt(norm2(a, n)); }

inline double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline VecN add(const VecN& a, const VecN& b, int n) {
  VecN r{};
  for (int i = 0; i < n; ++i) r[i] = a[i] + b[i];
  return r;
}

inline VecN sub(const VecN& a, const VecN& b, int n) {
  VecN r{};
  for (int i = 0; i < n; ++i) r[i] = a[i] - b[i];
  return r;
}

inline VecN scale(const VecN& a, double s, int n) {
  VecN r{};
  for (int i = 0; i < n; ++i) r[i] = a[i] * s;
  return r;
}

// Axis-aligned box with runtime dimension.
struct Box {
  VecN lo{};
  VecN hi{};
  int n = 0;

  double diameter() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = hi[i] - lo[i];
      s += e * e;
    }
    return std::sqrt(s);
  }

  // Squared distance from x to the box (0 if inside).
  double min_dist2(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = 0.0;
      if (x[i] < lo[i]) d = lo[i] - x[i];
      else if (x[i] > hi[i]) d = x[i] - hi[i];
      s += d * d;
    }
    return s;
  }

  // Squared distance from x to the farthest box corner.
  double max_dist2(std::span<const double> x) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = std::max(std::abs(x[i] - lo[i]), std::abs(x[i] - hi[i]));
      s += d * d;
    }
    return s;
  }
};

}  // namespace rdlab

#include "rdlab/whitney.hpp"

#include <cmath>
#include <stdexcept>

namespace rdlab {

namespace {

struct Walker {
  const SpatialIndex* index;
  const CarlesonWindow* window;
  double kappa_h;
  int max_depth;
  int n;
  std::vector<WhitneyCell>* out;

  void visit(const VecN& center, double side, int depth) {
    // Drop cells entirely outside the window ball.
    Box box;
    box.n = n;
    for (int a = 0; a < n; ++a) {
      box.lo[a] = center[a] - 0.5 * side;
      box.hi[a] = center[a] + 0.5 * side;
    }
    const std::span<const double> wc(window->center.data(), static_cast<std::size_t>(n));
    if (box.min_dist2(wc) > window->radius * window->radius) return;

    const double diam = side * std::sqrt(static_cast<double>(n));
    const double delta = index->nearest({center.data(), static_cast<std::size_t>(n)}).dist;

    if (delta >= diam) {
      emit(center, side, delta, depth, /*truncated=*/false);
      return;
    }
    if (delta < kappa_h) {
      // Below the resolution floor: stop, flag instead of recursing.
      emit(center, side, delta, depth, /*truncated=*/false, /*resolved=*/false);
      return;
    }
    if (depth >= max_depth) {
      emit(center, side, delta, depth, /*truncated=*/true);
      return;
    }
    const double half = 0.25 * side;
    VecN child{};
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      for (int a = 0; a < n; ++a)
        child[a] = center[a] + ((mask >> a) & 1u ? half : -half);
      visit(child, 0.5 * side, depth + 1);
    }
  }

  void emit(const VecN& center, double side, double delta, int depth, bool truncated,
            bool resolved = true) {
    // Midpoint rule: a cell counts only when its center lies in the ball.
    double d2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double d = center[a] - window->center[a];
      d2 += d * d;
    }
    if (d2 > window->radius * window->radius) return;
    WhitneyCell c;
    c.center = center;
    c.side = side;
    c.delta = delta;
    c.depth = depth;
    c.resolved = resolved && delta >= kappa_h;
    c.truncated = truncated;
    out->push_back(c);
  }
};

}  // namespace

std::vector<WhitneyCell> whitney_decompose(const SpatialIndex& index,
                                           const CarlesonWindow& window,
                                           double kappa_h, int max_depth) {
  if (!(window.radius > 0.0)) throw std::invalid_argument("whitney: window radius must be positive");
  if (index.dim() > 16) throw std::invalid_argument("whitney: dimension too large");
  std::vector<WhitneyCell> cells;
  Walker w{&index, &window, kappa_h, max_depth, index.dim(), &cells};
  w.visit(window.center, 2.0 * window.radius, 0);
  return cells;
}

}  // namespace rdlab

#pragma once

#include <vector>

#include "rdlab/geometry.hpp"
#include "rdlab/spatial_index.hpp"

namespace rdlab {

// One dyadic cube of the Whitney family: emitted when its diameter is
// comparable to the distance to the set, diam <= delta(center) <= 4*diam.
struct WhitneyCell {
  VecN center{};
  double side = 0;
  double delta = 0;
  int depth = 0;
  bool resolved = true;   // delta(center) >= kappa*h
  bool truncated = false; // recursion stopped by max_depth
};

struct CarlesonWindow {
  VecN center{};  // X on the support
  double radius = 0;
};

// Recursive dyadic subdivision of the window box (side 2*radius). A cube is
// emitted when diam <= delta(center) <= 4*diam, recursed while
// delta(center) < diam, and dropped when it lies entirely outside the window
// ball or its center leaves the ball. Cells whose center is closer to the
// cloud than kappa*h are emitted unresolved instead of recursing further.
std::vector<WhitneyCell> whitney_decompose(const SpatialIndex& index,
                                           const CarlesonWindow& window,
                                           double kappa_h, int max_depth = 48);

}  // namespace rdlab

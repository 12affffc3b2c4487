#pragma once

#include <vector>

#include "rdlab/plane_fit.hpp"
#include "rdlab/point_measure.hpp"
#include "rdlab/rng.hpp"
#include "rdlab/spatial_index.hpp"
#include "rdlab/whitney.hpp"

namespace rdlab {

struct BetaOptions {
  int refine_iters = 80;       // Nelder-Mead budget for the plane search
  int max_plane_grid = 256;    // probe nodes per plane axis (caps the grid cost)
};

struct BetaResult {
  double beta = 0;             // two-sided normalized distance, best plane
  double set_to_plane = 0;     // sup over support points of dist to the plane, / r
  double plane_to_set = 0;     // sup over the plane grid of dist to the cloud, / r
  PlaneFrame plane;
  std::size_t support_count = 0;
};

// Bilateral beta number at (x, r): PCA seed plus derivative-free refinement
// over plane tilt and normal offset. Requires integer d and at least d+1
// support points in the closed ball.
BetaResult beta_bilateral(const PointMeasure& m, const SpatialIndex& index,
                          std::span<const double> x, double r,
                          const BetaOptions& opts = {});

// Evaluate the bilateral objective for one fixed plane (exposed for the
// exhaustive oracles in the tests).
BetaResult beta_for_plane(const PointMeasure& m, const SpatialIndex& index,
                          std::span<const double> x, double r, const PlaneFrame& plane,
                          int max_plane_grid = 256);

struct BwglOptions {
  double tau = 1.0 / 16.0;
  std::size_t centers_per_scale = 12;
  double min_radius_factor = 20.0;  // smallest scale = factor * h
  BetaOptions beta;
};

struct BwglScale {
  double radius = 0;
  std::size_t probed = 0;
  std::size_t bad = 0;
};

struct BwglResult {
  double carleson_estimate = 0;  // normalized by R^d
  std::vector<BwglScale> scales;
};

// Empirical Carleson estimate of the bad-pair set {(x, r): beta_b >= tau}
// over a dyadic scale ladder inside the window: sum over scales of
// (window mass) * (bad fraction) * log(2), normalized by R^d.
BwglResult bwgl_count(const PointMeasure& m, const SpatialIndex& index,
                      const CarlesonWindow& window, const BwglOptions& opts, Rng rng);

}  // namespace rdlab

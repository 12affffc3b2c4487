#pragma once

#include <cstdint>
#include <vector>

#include "rdlab/plane_fit.hpp"
#include "rdlab/point_measure.hpp"
#include "rdlab/spatial_index.hpp"

namespace rdlab {

// Discrete instance of the localized transport problem at (x, r):
//   maximize  sum_k f_k * mass_k
//   subject to |f_k - f_l| <= |z_k - z_l|  and  |f_k| <= r - |z_k - x|.
// Solved through its flow dual (uncapacitated min-cost transshipment with a
// boundary sink priced at the distance to the sphere).
struct TransportInstance {
  int n = 0;
  VecN x{};
  double r = 0;
  std::vector<double> coords;  // K*n
  std::vector<double> mass;    // signed: +mu, -nu
  std::vector<double> ucap;    // r - |z - x|

  std::size_t size() const { return mass.size(); }
  std::span<const double> node(std::size_t k) const {
    return {coords.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
};

struct TransportSolution {
  double value = 0;        // LP optimum = min transport cost
  std::vector<double> f;   // optimal test-function values (dual potentials)
  std::size_t augmentations = 0;
};

// Pairwise constraints kept in the solve: every pair below the threshold,
// otherwise a 32-nearest-neighbor graph plus hub arcs through the top two
// levels of the cluster tree.
struct TransportOptions {
  std::size_t dense_threshold = 300;
  int knn = 32;
};

TransportSolution solve_transport(const TransportInstance& inst,
                                  const TransportOptions& opts = {});

struct AlphaOptions {
  std::size_t budget_mu = 96;   // working nodes for the mu side
  std::size_t budget_nu = 96;   // grid nodes of the flat candidate
  int nm_iters = 60;
  TransportOptions lp;
};

struct AlphaProblem {
  VecN x{};
  double r = 0;
  double alpha = 0;            // best normalized distance found
  double lp_value = 0;         // un-normalized optimum at the best candidate
  FlatMeasure nu;              // achieved flat candidate
  double nu_step = 0;
  std::size_t mu_nodes = 0;
  std::size_t nu_nodes = 0;
  bool approximate = false;    // outer search hit its iteration cap
  std::vector<double> f;       // optimizing test-function values
  TransportInstance instance;  // joint support at the best candidate
};

// Normalized transport distance from mu restricted to B(x,r) to one fixed
// flat candidate: r^(-d-1) * LP value.
double flat_distance(const PointMeasure& m, const SpatialIndex& index,
                     std::span<const double> x, double r, const FlatMeasure& nu,
                     double nu_step, const TransportOptions& opts = {},
                     TransportInstance* inst_out = nullptr,
                     TransportSolution* sol_out = nullptr);

// Tolsa-style alpha number: PCA-seeded flat candidate, mass-matched density,
// derivative-free refinement over tilt, density and offset.
AlphaProblem alpha_number(const PointMeasure& m, const SpatialIndex& index,
                          std::span<const double> x, double r,
                          const AlphaOptions& opts = {});

// Working nodes of mu restricted to B(x,r): cell-merged to the budget.
// Returns the cell size used (0 when no merging was necessary).
double coarsen_ball(const PointMeasure& m, const SpatialIndex& index,
                    std::span<const double> x, double r, std::size_t budget,
                    std::vector<double>& coords_out, std::vector<double>& mass_out);

}  // namespace rdlab

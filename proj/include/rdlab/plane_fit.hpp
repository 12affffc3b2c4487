#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdlab/geometry.hpp"
#include "rdlab/spatial_index.hpp"

namespace rdlab {

// Affine d-plane in R^n carried as an orthonormal frame: the first d columns
// span the plane, the remaining n-d span its normal complement.
struct PlaneFrame {
  int n = 0;
  int d = 0;
  VecN base{};
  std::array<VecN, kMaxDim> axes{};  // axes[0..d-1] tangent, axes[d..n-1] normal

  // Distance from x to the affine plane.
  double dist(std::span<const double> x) const;

  // Tangential coordinates of x relative to base.
  VecN tangential(std::span<const double> x) const;

  // base + sum t_i axes[i] (first d entries of t).
  VecN embed(std::span<const double> t) const;

  // Frame perturbed by a tilt matrix (d x (n-d), row-major) applied to the
  // tangent vectors, re-orthonormalized, plus a shift of the base point.
  PlaneFrame perturbed(std::span<const double> tilt, std::span<const double> shift) const;

  double orthonormality_defect() const;
};

// A plane plus a constant density: the flat comparison measures.
struct FlatMeasure {
  PlaneFrame plane;
  double density = 1.0;
};

struct PcaFit {
  PlaneFrame frame;
  std::array<double, kMaxDim> eigenvalues{};  // descending
  double eigengap = 0;  // lambda_d / max(lambda_{d+1}, tiny); large means stable
};

// Weighted PCA plane through the weighted mean of the listed points
// (tree-layout ids of the index).
PcaFit pca_plane(const SpatialIndex& index, std::span<const std::uint32_t> ids, int d);

}  // namespace rdlab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdlab/geometry.hpp"
#include "rdlab/point_measure.hpp"

namespace rdlab {

// Hierarchical axis-aligned box tree over the points of a measure. Stores
// per-node bounding box, total weight and weighted centroid, so the same
// structure backs nearest-neighbor queries, ball-mass counting and the
// far-field monopole expansion of the kernel summation. Immutable once built.
class SpatialIndex {
 public:
  struct Node {
    Box box;
    VecN centroid{};
    double weight = 0;
    double radius = 0;  // max distance from centroid to a member point
    std::uint32_t begin = 0, end = 0;
    std::int32_t left = -1, right = -1;
    bool leaf() const { return left < 0; }
  };

  SpatialIndex() = default;
  explicit SpatialIndex(const PointMeasure& m, std::uint32_t leaf_size = 16);

  int dim() const { return n_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  // Reordered storage: point k of the tree layout.
  std::span<const double> point(std::uint32_t k) const {
    return {coords_.data() + static_cast<std::size_t>(k) * n_, static_cast<std::size_t>(n_)};
  }
  double weight(std::uint32_t k) const { return weights_[k]; }
  std::uint32_t original_id(std::uint32_t k) const { return ids_[k]; }

  // Coordinates of a point by its original (measure) id.
  std::span<const double> point_by_id(std::uint32_t original) const {
    return point(slot_of_[original]);
  }

  struct Nearest {
    double dist = 0;
    std::uint32_t id = 0;  // original point id
  };

  // Exact nearest neighbor over the cloud.
  Nearest nearest(std::span<const double> x) const;

  // Total weight of points in the closed ball B(x, r).
  double ball_mass(std::span<const double> x, double r) const;

  // Number of points in the closed ball.
  std::size_t ball_count(std::span<const double> x, double r) const;

  // Tree-layout indices of the points in the closed ball.
  void ball_points(std::span<const double> x, double r, std::vector<std::uint32_t>& out) const;

 private:
  std::int32_t build(std::uint32_t begin, std::uint32_t end, std::uint32_t leaf_size);
  void nearest_walk(std::int32_t node, std::span<const double> x, Nearest& best) const;

  int n_ = 0;
  std::vector<double> coords_;   // permuted copy, flat
  std::vector<double> weights_;  // permuted copy
  std::vector<std::uint32_t> ids_;
  std::vector<std::uint32_t> slot_of_;  // inverse permutation
  std::vector<Node> nodes_;
};

}  // namespace rdlab

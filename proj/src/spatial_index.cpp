#include "rdlab/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rdlab {

SpatialIndex::SpatialIndex(const PointMeasure& m, std::uint32_t leaf_size) {
  n_ = m.ambient_dim;
  const std::size_t count = m.count();
  if (count == 0) throw std::invalid_argument("spatial index: empty measure");
  ids_.resize(count);
  std::iota(ids_.begin(), ids_.end(), 0u);
  coords_ = m.coords;
  weights_ = m.weights;
  nodes_.reserve(2 * count / std::max<std::uint32_t>(1, leaf_size) + 64);
  build(0, static_cast<std::uint32_t>(count), std::max<std::uint32_t>(1, leaf_size));
  slot_of_.resize(count);
  for (std::uint32_t k = 0; k < count; ++k) slot_of_[ids_[k]] = k;
}

std::int32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end,
                                 std::uint32_t leaf_size) {
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  {
    Node& node = nodes_.back();
    node.begin = begin;
    node.end = end;
    node.box.n = n_;
    for (int a = 0; a < n_; ++a) {
      node.box.lo[a] = std::numeric_limits<double>::infinity();
      node.box.hi[a] = -std::numeric_limits<double>::infinity();
    }
    double wsum = 0.0;
    VecN c{};
    for (std::uint32_t k = begin; k < end; ++k) {
      const double* p = coords_.data() + static_cast<std::size_t>(k) * n_;
      const double w = weights_[k];
      wsum += w;
      for (int a = 0; a < n_; ++a) {
        node.box.lo[a] = std::min(node.box.lo[a], p[a]);
        node.box.hi[a] = std::max(node.box.hi[a], p[a]);
        c[a] += w * p[a];
      }
    }
    node.weight = wsum;
    for (int a = 0; a < n_; ++a) node.centroid[a] = c[a] / wsum;
    double r2max = 0.0;
    for (std::uint32_t k = begin; k < end; ++k) {
      const double* p = coords_.data() + static_cast<std::size_t>(k) * n_;
      double s = 0.0;
      for (int a = 0; a < n_; ++a) {
        const double d = p[a] - node.centroid[a];
        s += d * d;
      }
      r2max = std::max(r2max, s);
    }
    node.radius = std::sqrt(r2max);
  }

  if (end - begin <= leaf_size) return id;

  // Median split along the widest box axis.
  int axis = 0;
  double best = -1.0;
  for (int a = 0; a < n_; ++a) {
    const double e = nodes_[id].box.hi[a] - nodes_[id].box.lo[a];
    if (e > best) {
      best = e;
      axis = a;
    }
  }
  if (!(best > 0.0)) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  // Sort the permutation segment; move coordinates/weights along with it.
  std::vector<std::uint32_t> seg(end - begin);
  std::iota(seg.begin(), seg.end(), begin);
  std::nth_element(seg.begin(), seg.begin() + (mid - begin), seg.end(),
                   [this, axis](std::uint32_t a, std::uint32_t b) {
                     const double va = coords_[static_cast<std::size_t>(a) * n_ + axis];
                     const double vb = coords_[static_cast<std::size_t>(b) * n_ + axis];
                     if (va != vb) return va < vb;
                     return ids_[a] < ids_[b];  // deterministic tie-break
                   });
  // Apply the permutation of this segment in place.
  std::vector<double> tmp_coords(static_cast<std::size_t>(end - begin) * n_);
  std::vector<double> tmp_w(end - begin);
  std::vector<std::uint32_t> tmp_ids(end - begin);
  for (std::uint32_t i = 0; i < end - begin; ++i) {
    const std::uint32_t src = seg[i];
    for (int a = 0; a < n_; ++a)
      tmp_coords[static_cast<std::size_t>(i) * n_ + a] =
          coords_[static_cast<std::size_t>(src) * n_ + a];
    tmp_w[i] = weights_[src];
    tmp_ids[i] = ids_[src];
  }
  std::copy(tmp_coords.begin(), tmp_coords.end(),
            coords_.begin() + static_cast<std::size_t>(begin) * n_);
  std::copy(tmp_w.begin(), tmp_w.end(), weights_.begin() + begin);
  std::copy(tmp_ids.begin(), tmp_ids.end(), ids_.begin() + begin);

  const std::int32_t left = build(begin, mid, leaf_size);
  const std::int32_t right = build(mid, end, leaf_size);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void SpatialIndex::nearest_walk(std::int32_t ni, std::span<const double> x,
                                Nearest& best) const {
  const Node& node = nodes_[ni];
  if (node.box.min_dist2(x) >= best.dist * best.dist) return;
  if (node.leaf()) {
    for (std::uint32_t k = node.begin; k < node.end; ++k) {
      const double d2 = dist2(point(k), x);
      if (d2 < best.dist * best.dist) {
        best.dist = std::sqrt(d2);
        best.id = ids_[k];
      }
    }
    return;
  }
  const double dl = nodes_[node.left].box.min_dist2(x);
  const double dr = nodes_[node.right].box.min_dist2(x);
  if (dl <= dr) {
    nearest_walk(node.left, x, best);
    nearest_walk(node.right, x, best);
  } else {
    nearest_walk(node.right, x, best);
    nearest_walk(node.left, x, best);
  }
}

SpatialIndex::Nearest SpatialIndex::nearest(std::span<const double> x) const {
  Nearest best;
  best.dist = std::numeric_limits<double>::infinity();
  nearest_walk(0, x, best);
  return best;
}

double SpatialIndex::ball_mass(std::span<const double> x, double r) const {
  const double r2 = r * r;
  double mass = 0.0;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.min_dist2(x) > r2) continue;
    if (node.box.max_dist2(x) <= r2) {
      mass += node.weight;
      continue;
    }
    if (node.leaf()) {
      for (std::uint32_t k = node.begin; k < node.end; ++k)
        if (dist2(point(k), x) <= r2) mass += weights_[k];
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return mass;
}

std::size_t SpatialIndex::ball_count(std::span<const double> x, double r) const {
  const double r2 = r * r;
  std::size_t cnt = 0;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.min_dist2(x) > r2) continue;
    if (node.box.max_dist2(x) <= r2) {
      cnt += node.end - node.begin;
      continue;
    }
    if (node.leaf()) {
      for (std::uint32_t k = node.begin; k < node.end; ++k)
        if (dist2(point(k), x) <= r2) ++cnt;
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return cnt;
}

void SpatialIndex::ball_points(std::span<const double> x, double r,
                               std::vector<std::uint32_t>& out) const {
  out.clear();
  const double r2 = r * r;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.min_dist2(x) > r2) continue;
    if (node.box.max_dist2(x) <= r2) {
      for (std::uint32_t k = node.begin; k < node.end; ++k) out.push_back(k);
      continue;
    }
    if (node.leaf()) {
      for (std::uint32_t k = node.begin; k < node.end; ++k)
        if (dist2(point(k), x) <= r2) out.push_back(k);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace rdlab

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rdlab/geometry.hpp"
#include "rdlab/rng.hpp"

namespace rdlab {

// Weighted point-cloud approximation of a d-Ahlfors-regular measure on a set
// E in R^n. Immutable after construction; all queries are pure.
struct PointMeasure {
  int ambient_dim = 0;       // n >= 2
  double hausdorff_dim = 0;  // d in (0, n)
  std::vector<double> coords;   // flat, count*n
  std::vector<double> weights;  // per-point mass
  double spacing = 0;           // h: inter-point gap at the finest scale
  double total_mass = 0;
  std::string label;

  // Window metadata. `extent` is the half-size of the generated window;
  // `truncated` marks sets that continue past it (planes, graphs), so that
  // far-field tail estimates can be attached to potential evaluations.
  double extent = 0;
  bool truncated = false;
  double reg_upper = 0;  // empirical upper Ahlfors density, for tail bounds

  std::size_t count() const { return weights.size(); }

  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(ambient_dim),
            static_cast<std::size_t>(ambient_dim)};
  }

  // Throws std::invalid_argument if basic invariants fail (positive weights,
  // mass consistency, spacing sanity on a sampled subset).
  void validate() const;
};

struct GraphProfile {
  std::string name;   // "sine" | "sawtooth" | "bump"
  double amplitude = 0;
  double wavelength = 1;

  double value(double u) const;
  double slope(double u) const;   // analytic derivative
  double lipschitz() const;
};

// Uniform grid on the coordinate d-plane {x_{d+1} = ... = x_n = 0}, side
// 2*extent, every node weighted density*cell^d.
PointMeasure gen_flat_plane(int n, int d, double density, double extent, double spacing);

// Generation-k iterated corner system: 4 maps of ratio 1/4 on [0, scale]^2,
// embedded in the first coordinate 2-plane of R^n. Points sit at the centers
// of the generation-k squares; d = 1 and total mass = scale.
PointMeasure gen_four_corner_cantor(int generation, double scale, int embed_dim,
                                    std::size_t point_budget = (1u << 24));

// Graph {(u, profile(u))} over the coordinate d-plane, weighted by the
// analytic surface element. Only scalar profiles varying along the first
// plane coordinate are cataloged.
PointMeasure gen_lipschitz_graph(int n, int d, const GraphProfile& profile,
                                 double extent, double spacing);

// Circle of radius rho in the first coordinate 2-plane (d = 1), or the round
// sphere for d = n-1 = 2. Weights sum to the exact d-measure.
PointMeasure gen_sphere(int n, int d, double rho, double spacing);

// Exact affine pushforward: points (p-Q)/r, weights w/r^d, spacing h/r.
PointMeasure rescale_blowup(const PointMeasure& m, std::span<const double> q, double r);

// Multiply every weight by s (diagnostic helper for scaling laws).
PointMeasure scale_weights(const PointMeasure& m, double s);

// Columnar text format:
//   # n=<int> d=<float> h=<float> mass=<float> label=<text>
//   x1 ... xn weight
void save_measure(const PointMeasure& m, std::ostream& out);
void save_measure_file(const PointMeasure& m, const std::string& path);
PointMeasure load_measure(std::istream& in);
PointMeasure load_measure_file(const std::string& path);

// Ahlfors-regularity probe: ratios mu(B(Q,r))/r^d over sampled centers and
// admitted radii.
struct RegularityAudit {
  std::vector<std::size_t> center_ids;
  std::vector<double> radii;
  std::vector<double> ratios;  // row-major centers x radii, NaN where skipped
  double c_low = 0;
  double c_high = 0;
  std::size_t valid_probes = 0;

  double ratio(std::size_t ci, std::size_t ri) const {
    return ratios[ci * radii.size() + ri];
  }
};

class SpatialIndex;

RegularityAudit audit_regularity(const PointMeasure& m, const SpatialIndex& index,
                                 std::size_t num_centers, std::span<const double> radii,
                                 Rng rng, double kappa = 5.0);

// Dyadic radius ladder within the admitted window [kappa*h, diam/4].
std::vector<double> audit_radii(const PointMeasure& m, double kappa = 5.0);

}  // namespace rdlab

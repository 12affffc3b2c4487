#pragma once

#include <vector>

#include "rdlab/field.hpp"

namespace rdlab {

// Sampled descent trajectory of D: d phi/dt = -grad D(phi), integrated until
// the trajectory enters the unresolved collar around the cloud.
struct FlowTrace {
  VecN x0{};
  double step_factor = 0;
  std::vector<double> times;          // pseudo-time stamps
  std::vector<VecN> points;           // phi at those stamps
  std::vector<double> D_along;
  std::vector<double> delta_along;
  VecN p{};                           // terminal estimate, snapped to the cloud
  std::uint32_t p_id = 0;             // support point the endpoint snapped to
  double arc_length = 0;
  double chord_deviation = 0;         // max distance from the polyline to [x0, p]
  bool stagnated = false;             // |grad D| vanished en route
};

struct FlowOptions {
  double step_factor = 0.1;  // step <= factor * delta / |grad D|
  std::size_t max_steps = 20000;
};

// Classical RK4 with the geometric step rule; stops below kappa*h and snaps
// the endpoint to the nearest support point. Throws on stagnation
// (|grad D| < 1e-10) and on step underflow.
FlowTrace integrate_flow(const FieldEvaluator& eval, std::span<const double> x0,
                         const FlowOptions& opts = {});

// Ascent variant from a mid-trajectory point (the reverse flow), used by the
// reversibility checks.
std::vector<VecN> integrate_ascent(const FieldEvaluator& eval, std::span<const double> x0,
                                   double total_time, const FlowOptions& opts = {});

struct ProjectionGapStats {
  std::size_t samples = 0;
  double gap_min = 0, gap_max = 0, gap_mean = 0;       // (|p(x)-x| - delta)/delta
  double ratio_min = 0, ratio_max = 0, ratio_mean = 0;  // D/delta
};

ProjectionGapStats projection_gap(const FieldEvaluator& eval,
                                  std::span<const VecN> samples,
                                  const FlowOptions& opts = {});

}  // namespace rdlab

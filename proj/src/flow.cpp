#include "rdlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdlab {

namespace {

double dist_point_segment(const VecN& p, const VecN& a, const VecN& b, int n) {
  VecN ab = sub(b, a, n);
  const double len2 = norm2(ab, n);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(sub(p, a, n), ab, n) / len2, 0.0, 1.0);
  VecN proj = add(a, scale(ab, t, n), n);
  return norm(sub(p, proj, n), n);
}

VecN grad_at(const FieldEvaluator& eval, const VecN& x, int n, bool* ok) {
  const FieldEval e = eval.eval({x.data(), static_cast<std::size_t>(n)});
  if (ok) *ok = true;
  return e.gradD;
}

}  // namespace

FlowTrace integrate_flow(const FieldEvaluator& eval, std::span<const double> x0,
                         const FlowOptions& opts) {
  const int n = eval.kernel().n;
  const double floor = eval.kappa_h();

  FlowTrace trace;
  trace.x0 = make_vec(x0);
  trace.step_factor = opts.step_factor;

  VecN x = trace.x0;
  double t = 0.0;
  FieldEval e = eval.eval({x.data(), static_cast<std::size_t>(n)});
  if (!e.resolved) throw std::domain_error("flow: start point unresolved");

  trace.times.push_back(t);
  trace.points.push_back(x);
  trace.D_along.push_back(e.D);
  trace.delta_along.push_back(e.delta);

  for (std::size_t step = 0; step < opts.max_steps; ++step) {
    const double g = e.norm_gradD(n);
    if (g < 1e-10) {
      trace.stagnated = true;
      throw std::domain_error("flow: stagnation (|grad D| ~ 0)");
    }
    const double dt = opts.step_factor * e.delta / g;
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("flow: step underflow");

    // RK4 on dx/dt = -grad D.
    const VecN k1 = e.gradD;
    const VecN x2 = sub(x, scale(k1, 0.5 * dt, n), n);
    const VecN k2 = grad_at(eval, x2, n, nullptr);
    const VecN x3 = sub(x, scale(k2, 0.5 * dt, n), n);
    const VecN k3 = grad_at(eval, x3, n, nullptr);
    const VecN x4 = sub(x, scale(k3, dt, n), n);
    const VecN k4 = grad_at(eval, x4, n, nullptr);

    VecN incr{};
    for (int a = 0; a < n; ++a)
      incr[a] = dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    const VecN xn = sub(x, incr, n);

    trace.arc_length += norm(incr, n);
    t += dt;
    x = xn;
    e = eval.eval({x.data(), static_cast<std::size_t>(n)});

    trace.times.push_back(t);
    trace.points.push_back(x);
    trace.D_along.push_back(e.D);
    trace.delta_along.push_back(e.delta);

    if (e.delta < floor) break;
  }
  if (trace.delta_along.back() >= floor)
    throw std::domain_error("flow: step budget exhausted before reaching the cloud");

  // Snap the endpoint to the nearest support point; the snap error is <= h
  // and is visible through delta_along.
  const auto nn = eval.index().nearest({x.data(), static_cast<std::size_t>(n)});
  trace.p_id = nn.id;
  trace.p = make_vec(eval.measure().point(nn.id));
  trace.arc_length += nn.dist;

  for (const auto& pt : trace.points)
    trace.chord_deviation =
        std::max(trace.chord_deviation, dist_point_segment(pt, trace.x0, trace.p, n));
  return trace;
}

std::vector<VecN> integrate_ascent(const FieldEvaluator& eval, std::span<const double> x0,
                                   double total_time, const FlowOptions& opts) {
  const int n = eval.kernel().n;
  std::vector<VecN> out;
  VecN x = make_vec(x0);
  out.push_back(x);
  double t = 0.0;
  while (t < total_time) {
    const FieldEval e = eval.eval({x.data(), static_cast<std::size_t>(n)});
    const double g = e.norm_gradD(n);
    if (g < 1e-10) throw std::domain_error("ascent: stagnation");
    const double dt = std::min(opts.step_factor * e.delta / g, total_time - t);

    const VecN k1 = e.gradD;
    const VecN x2 = add(x, scale(k1, 0.5 * dt, n), n);
    const VecN k2 = grad_at(eval, x2, n, nullptr);
    const VecN x3 = add(x, scale(k2, 0.5 * dt, n), n);
    const VecN k3 = grad_at(eval, x3, n, nullptr);
    const VecN x4 = add(x, scale(k3, dt, n), n);
    const VecN k4 = grad_at(eval, x4, n, nullptr);
    for (int a = 0; a < n; ++a)
      x[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    t += dt;
    out.push_back(x);
  }
  return out;
}

ProjectionGapStats projection_gap(const FieldEvaluator& eval, std::span<const VecN> samples,
                                  const FlowOptions& opts) {
  const int n = eval.kernel().n;
  ProjectionGapStats stats;
  bool first = true;
  for (const auto& x : samples) {
    const double delta = eval.delta({x.data(), static_cast<std::size_t>(n)});
    const FlowTrace trace = integrate_flow(eval, {x.data(), static_cast<std::size_t>(n)}, opts);
    const double reach = norm(sub(trace.p, trace.x0, n), n);
    const double gap = (reach - delta) / delta;
    const double ratio = eval.eval({x.data(), static_cast<std::size_t>(n)}).D / delta;
    if (first) {
      stats.gap_min = stats.gap_max = gap;
      stats.ratio_min = stats.ratio_max = ratio;
      first = false;
    }
    stats.gap_min = std::min(stats.gap_min, gap);
    stats.gap_max = std::max(stats.gap_max, gap);
    stats.gap_mean += gap;
    stats.ratio_min = std::min(stats.ratio_min, ratio);
    stats.ratio_max = std::max(stats.ratio_max, ratio);
    stats.ratio_mean += ratio;
    ++stats.samples;
  }
  if (stats.samples) {
    stats.gap_mean /= static_cast<double>(stats.samples);
    stats.ratio_mean /= static_cast<double>(stats.samples);
  }
  return stats;
}

}  // namespace rdlab

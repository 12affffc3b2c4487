#include "rdlab/beta_numbers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdlab/optim.hpp"

namespace rdlab {

namespace {

int require_integer_dim(const PointMeasure& m) {
  const double d = m.hausdorff_dim;
  const double rd = std::round(d);
  if (std::abs(d - rd) > 1e-12)
    throw std::invalid_argument(
        "beta/alpha diagnostics need integer d: flat comparison measures live on integer-"
        "dimensional planes");
  return static_cast<int>(rd);
}

}  // namespace

BetaResult beta_for_plane(const PointMeasure& m, const SpatialIndex& index,
                          std::span<const double> x, double r, const PlaneFrame& plane,
                          int max_plane_grid) {
  const int n = m.ambient_dim;
  const int d = plane.d;
  BetaResult res;
  res.plane = plane;

  // sup over support points in the closed ball of the distance to the plane.
  std::vector<std::uint32_t> ids;
  index.ball_points(x, r, ids);
  res.support_count = ids.size();
  double sup_set = 0.0;
  for (const auto k : ids) sup_set = std::max(sup_set, plane.dist(index.point(k)));

  // sup over a grid on plane cap B(x,r) of the distance to the cloud.
  const double step_cap = 2.0 * r / static_cast<double>(max_plane_grid);
  const double step = std::max(m.spacing, step_cap);
  const VecN t0 = plane.tangential(x);
  const long half = std::lround(std::floor(r / step));
  double sup_plane = 0.0;
  std::vector<long> idx(d, -half);
  const std::size_t nodes = [&] {
    std::size_t t = 1;
    for (int a = 0; a < d; ++a) t *= static_cast<std::size_t>(2 * half + 1);
    return t;
  }();
  VecN t{};
  for (std::size_t c = 0; c < nodes; ++c) {
    for (int a = 0; a < d; ++a) t[a] = t0[a] + step * static_cast<double>(idx[a]);
    const VecN g = plane.embed({t.data(), static_cast<std::size_t>(d)});
    double dd2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dv = g[i] - x[i];
      dd2 += dv * dv;
    }
    if (dd2 <= r * r) {
      const double dist = index.nearest({g.data(), static_cast<std::size_t>(n)}).dist;
      sup_plane = std::max(sup_plane, dist);
    }
    for (int a = 0; a < d; ++a) {
      if (++idx[a] <= half) break;
      idx[a] = -half;
    }
  }

  res.set_to_plane = sup_set / r;
  res.plane_to_set = sup_plane / r;
  res.beta = res.set_to_plane + res.plane_to_set;
  return res;
}

BetaResult beta_bilateral(const PointMeasure& m, const SpatialIndex& index,
                          std::span<const double> x, double r, const BetaOptions& opts) {
  const int d = require_integer_dim(m);
  const int n = m.ambient_dim;
  const int codim = n - d;

  std::vector<std::uint32_t> ids;
  index.ball_points(x, r, ids);
  if (ids.size() < static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("beta_bilateral: fewer than d+1 points in the ball");

  PcaFit seed = pca_plane(index, ids, d);

  auto objective = [&](const std::vector<double>& params) {
    const std::span<const double> tilt(params.data(), static_cast<std::size_t>(d * codim));
    const std::span<const double> shift(params.data() + d * codim,
                                        static_cast<std::size_t>(codim));
    const PlaneFrame cand = seed.frame.perturbed(tilt, shift);
    return beta_for_plane(m, index, x, r, cand, opts.max_plane_grid).beta;
  };

  std::vector<double> p0(static_cast<std::size_t>(d * codim + codim), 0.0);
  std::vector<double> step(p0.size(), 0.05);
  for (int b = 0; b < codim; ++b) step[d * codim + b] = 0.05 * r;

  const NelderMeadResult nm = nelder_mead(objective, p0, step, opts.refine_iters);
  const std::span<const double> tilt(nm.x.data(), static_cast<std::size_t>(d * codim));
  const std::span<const double> shift(nm.x.data() + d * codim, static_cast<std::size_t>(codim));
  PlaneFrame best = seed.frame.perturbed(tilt, shift);
  BetaResult refined = beta_for_plane(m, index, x, r, best, opts.max_plane_grid);

  // Keep the PCA seed if refinement did not help (max-type objectives can
  // stall Nelder-Mead).
  BetaResult plain = beta_for_plane(m, index, x, r, seed.frame, opts.max_plane_grid);
  return plain.beta <= refined.beta ? plain : refined;
}

BwglResult bwgl_count(const PointMeasure& m, const SpatialIndex& index,
                      const CarlesonWindow& window, const BwglOptions& opts, Rng rng) {
  require_integer_dim(m);
  BwglResult out;
  const double r_min = opts.min_radius_factor * m.spacing;
  const std::span<const double> wc(window.center.data(),
                                   static_cast<std::size_t>(m.ambient_dim));
  const double window_mass = index.ball_mass(wc, window.radius);

  std::vector<std::uint32_t> ids;
  index.ball_points(wc, window.radius, ids);
  if (ids.empty()) return out;

  int scale_no = 0;
  for (double r = 0.5 * window.radius; r >= r_min; r *= 0.5, ++scale_no) {
    BwglScale sc;
    sc.radius = r;
    Rng stream = rng.stream("bwgl-scale", static_cast<std::uint64_t>(scale_no));
    const std::size_t probes = std::min(opts.centers_per_scale, ids.size());
    for (std::size_t p = 0; p < probes; ++p) {
      const std::uint32_t k = ids[stream.uniform_index(ids.size())];
      const auto center = index.point(k);
      BetaResult beta;
      try {
        beta = beta_bilateral(m, index, center, r, opts.beta);
      } catch (const std::invalid_argument&) {
        continue;  // too few points at this scale; skip the probe
      }
      ++sc.probed;
      if (beta.beta >= opts.tau) ++sc.bad;
    }
    out.scales.push_back(sc);
  }

  double sum = 0.0;
  for (const auto& sc : out.scales) {
    if (sc.probed == 0) continue;
    const double frac = static_cast<double>(sc.bad) / static_cast<double>(sc.probed);
    sum += window_mass * frac * std::log(2.0);
  }
  out.carleson_estimate = sum / std::pow(window.radius, m.hausdorff_dim);
  return out;
}

}  // namespace rdlab

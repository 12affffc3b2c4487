#include "rdlab/nt_limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdlab/kernel.hpp"

namespace rdlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kConverged: return "CONVERGED";
    case Verdict::kOscillating: return "OSCILLATING";
    case Verdict::kUnresolved: return "UNRESOLVED";
  }
  return "UNRESOLVED";
}

ConeScaleSample cone_sample(const SpatialIndex& index, const ConeSpec& cone, double radius,
                            std::size_t per_scale_count, Rng rng, double kappa_h) {
  const int n = index.dim();
  ConeScaleSample out;
  out.radius = radius;
  const std::span<const double> q(cone.q.data(), static_cast<std::size_t>(n));

  const std::size_t max_attempts = 400 * per_scale_count;
  std::size_t attempts = 0;
  while (out.points.size() < per_scale_count && attempts < max_attempts) {
    ++attempts;
    VecN x = rng.in_ball(q, radius, n);
    double rr = 0.0;
    for (int a = 0; a < n; ++a) {
      const double d = x[a] - cone.q[a];
      rr += d * d;
    }
    const double dist_q = std::sqrt(rr);
    if (dist_q < 0.5 * radius) continue;
    const double delta = index.nearest({x.data(), static_cast<std::size_t>(n)}).dist;
    if (delta < cone.eta * dist_q) continue;
    if (delta < kappa_h) continue;
    out.points.push_back(x);
  }
  out.resolved = out.points.size() >= std::max<std::size_t>(1, per_scale_count / 4);
  return out;
}

NTProbe nt_probe(const FieldEvaluator& eval, const ConeSpec& cone,
                 std::span<const double> radii, std::size_t per_scale_count, Rng rng,
                 double tol_rel) {
  const int n = eval.kernel().n;
  NTProbe probe;
  probe.tol_rel = tol_rel;

  std::size_t scale_no = 0;
  for (const double r : radii) {
    Rng stream = rng.stream("cone-scale", scale_no++);
    const ConeScaleSample sample =
        cone_sample(eval.index(), cone, r, per_scale_count, stream, eval.kappa_h());
    NTScaleStats st;
    st.radius = r;
    st.samples = sample.points.size();
    st.resolved = sample.resolved;
    if (!sample.points.empty()) {
      double lo = 0, hi = 0, sum = 0;
      bool first = true;
      for (const auto& x : sample.points) {
        const FieldEval e = eval.eval({x.data(), static_cast<std::size_t>(n)});
        const double g = e.norm_gradD(n);
        if (first) {
          lo = hi = g;
          first = false;
        }
        lo = std::min(lo, g);
        hi = std::max(hi, g);
        sum += g;
      }
      st.mean = sum / static_cast<double>(sample.points.size());
      st.osc = hi - lo;
    }
    probe.scales.push_back(st);
  }

  std::vector<const NTScaleStats*> resolved;
  for (const auto& st : probe.scales)
    if (st.resolved) resolved.push_back(&st);
  if (resolved.size() < 4) {
    probe.verdict = Verdict::kUnresolved;
    return probe;
  }

  // CONVERGED iff the last three resolved scales oscillate below tolerance
  // and their means agree within tolerance.
  const auto* a = resolved[resolved.size() - 3];
  const auto* b = resolved[resolved.size() - 2];
  const auto* c = resolved[resolved.size() - 1];
  const double mean_avg = (a->mean + b->mean + c->mean) / 3.0;
  const double tol = tol_rel * mean_avg;
  const bool osc_ok = a->osc < tol && b->osc < tol && c->osc < tol;
  const double mean_spread =
      std::max({a->mean, b->mean, c->mean}) - std::min({a->mean, b->mean, c->mean});
  if (osc_ok && mean_spread < tol) {
    probe.verdict = Verdict::kConverged;
    probe.limit_estimate = mean_avg;
  } else {
    probe.verdict = Verdict::kOscillating;
    probe.limit_estimate = mean_avg;
  }
  return probe;
}

DensityProfile density_estimate(const PointMeasure& m, const SpatialIndex& index,
                                std::span<const double> q, std::span<const double> radii,
                                double plateau_rel) {
  DensityProfile prof;
  const double vd = unit_ball_volume(static_cast<int>(std::lround(m.hausdorff_dim)));
  for (const double r : radii) {
    prof.radii.push_back(r);
    prof.theta.push_back(index.ball_mass(q, r) / (vd * std::pow(r, m.hausdorff_dim)));
  }
  if (prof.radii.empty()) return prof;

  // Plateau over the last dyadic octave of probed radii.
  const double r_min = *std::min_element(prof.radii.begin(), prof.radii.end());
  double lo = 0, hi = 0, sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    if (prof.radii[i] > 2.0 * r_min) continue;
    const double t = prof.theta[i];
    if (count == 0) {
      lo = hi = t;
    }
    lo = std::min(lo, t);
    hi = std::max(hi, t);
    sum += t;
    ++count;
  }
  if (count >= 2) {
    const double mean = sum / static_cast<double>(count);
    if (mean > 0.0 && (hi - lo) / mean < plateau_rel) {
      prof.has_density = true;
      prof.density = mean;
    }
  }
  return prof;
}

double predicted_limit(int d, double expo, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("predicted_limit: density must be positive");
  const FlatConstants fc = flat_constants(d, expo);
  return fc.c2 * std::pow(theta, -1.0 / expo);
}

BlowupReport blowup_compare(const FieldEvaluator& eval, std::span<const double> q,
                            std::span<const double> radii, std::size_t probe_count,
                            double plane_clearance) {
  const auto& k = eval.kernel();
  const int n = k.n;
  const int d = static_cast<int>(std::lround(k.d));
  BlowupReport rep;

  if (radii.empty()) {
    rep.aborted = true;
    rep.abort_reason = "empty radius sequence";
    return rep;
  }

  // Density at Q must plateau.
  std::vector<double> dens_radii;
  for (double r = radii.back(); r <= radii.front() * 4.0; r *= 2.0) dens_radii.push_back(r);
  const DensityProfile prof =
      density_estimate(eval.measure(), eval.index(), q, dens_radii);
  if (!prof.has_density) {
    rep.aborted = true;
    rep.abort_reason = "no density plateau at the base point";
    return rep;
  }
  rep.density = prof.density;

  // Tangent plane from the smallest scale; require a stable PCA gap.
  const double r_fit = radii.back();
  std::vector<std::uint32_t> ids;
  eval.index().ball_points(q, 4.0 * r_fit, ids);
  if (ids.size() < static_cast<std::size_t>(d) + 1) {
    rep.aborted = true;
    rep.abort_reason = "too few points for the tangent fit";
    return rep;
  }
  const PcaFit fit = pca_plane(eval.index(), ids, d);
  if (fit.eigengap < 10.0) {
    rep.aborted = true;
    rep.abort_reason = "unstable tangent fit (eigengap < 10)";
    return rep;
  }
  rep.plane = fit.frame;
  PlaneFrame through_q = fit.frame;
  for (int i = 0; i < n; ++i) through_q.base[i] = q[i];

  const double slope = predicted_limit(d, k.expo, prof.density);

  // Fixed probe grid in blow-up coordinates: unit shell, kept clear of the
  // plane (translated through the origin there).
  PlaneFrame origin_plane = through_q;
  for (int i = 0; i < n; ++i) origin_plane.base[i] = 0.0;
  std::vector<VecN> probes;
  Halton seq(n);
  while (probes.size() < probe_count) {
    VecN y = seq.next_in_unit_ball();
    const double rr = std::sqrt(norm2(y, n));
    if (rr < 0.5) continue;
    if (origin_plane.dist({y.data(), static_cast<std::size_t>(n)}) < plane_clearance * rr)
      continue;
    probes.push_back(y);
  }

  for (const double r : radii) {
    double worst = 0.0;
    for (const auto& y : probes) {
      VecN x{};
      for (int a = 0; a < n; ++a) x[a] = q[a] + r * y[a];
      const FieldEval e = eval.eval({x.data(), static_cast<std::size_t>(n)});
      const double model = slope * origin_plane.dist({y.data(), static_cast<std::size_t>(n)});
      worst = std::max(worst, std::abs(e.D / r - model));
    }
    rep.radii.push_back(r);
    rep.discrepancy.push_back(worst);
  }

  rep.monotone_decreasing = true;
  for (std::size_t i = 1; i < rep.discrepancy.size(); ++i)
    if (rep.discrepancy[i] > rep.discrepancy[i - 1]) rep.monotone_decreasing = false;
  return rep;
}

}  // namespace rdlab

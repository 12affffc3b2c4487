#include "rdlab/magic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdlab {

double magic_alpha(int n, double d) {
  const double alpha = n - d - 2.0;
  if (!(alpha > 0.0))
    throw std::invalid_argument("magic_alpha: needs d < n-2 (no admissible exponent)");
  return alpha;
}

namespace {

void require_resolved(const FieldEval& e, const char* what) {
  if (!e.resolved) throw std::domain_error(std::string(what) + ": stencil unresolved");
}

}  // namespace

ResidualLadder laplacian_R_residual(const FieldEvaluator& eval, std::span<const double> x,
                                    std::span<const double> step_fractions) {
  const int n = eval.kernel().n;
  const FieldEval at = eval.eval(x);
  require_resolved(at, "laplacian ladder");

  ResidualLadder lad;
  for (const double frac : step_fractions) {
    const double s = frac * at.delta;
    double lap = 0.0;
    VecN xs = make_vec(x);
    for (int a = 0; a < n; ++a) {
      xs[a] = x[a] + s;
      const FieldEval ep = eval.eval({xs.data(), static_cast<std::size_t>(n)});
      xs[a] = x[a] - s;
      const FieldEval em = eval.eval({xs.data(), static_cast<std::size_t>(n)});
      xs[a] = x[a];
      require_resolved(ep, "laplacian ladder");
      require_resolved(em, "laplacian ladder");
      lap += (ep.R - 2.0 * at.R + em.R) / (s * s);
    }
    lad.steps.push_back(s);
    lad.residual.push_back(std::abs(lap) * at.delta * at.delta / at.R);
  }
  lad.slope = loglog_slope(lad.steps, lad.residual);
  lad.final_value = lad.residual.back();
  return lad;
}

OperatorResidual operator_residual(const FieldEvaluator& eval, std::span<const double> x,
                                   std::span<const double> step_fractions) {
  const auto& k = eval.kernel();
  const int n = k.n;
  const double wexp = k.n - k.d - 1.0;  // weight D^-(n-d-1)
  const FieldEval at = eval.eval(x);
  require_resolved(at, "operator ladder");

  const double normalizer = std::pow(at.D, -wexp) * at.D / (at.delta * at.delta);

  OperatorResidual out;
  for (const double frac : step_fractions) {
    const double s = frac * at.delta;
    double div_q = 0.0;
    double lap_R = 0.0;
    VecN xs = make_vec(x);
    for (int a = 0; a < n; ++a) {
      xs[a] = x[a] + s;
      const FieldEval ep = eval.eval({xs.data(), static_cast<std::size_t>(n)});
      xs[a] = x[a] - s;
      const FieldEval em = eval.eval({xs.data(), static_cast<std::size_t>(n)});
      xs[a] = x[a];
      require_resolved(ep, "operator ladder");
      require_resolved(em, "operator ladder");
      const double qp = std::pow(ep.D, -wexp) * ep.gradD[a];
      const double qm = std::pow(em.D, -wexp) * em.gradD[a];
      div_q += (qp - qm) / (2.0 * s);
      lap_R += (ep.R - 2.0 * at.R + em.R) / (s * s);
    }
    out.steps.push_back(s);
    out.residual.push_back(std::abs(div_q) / normalizer);
    out.laplacian_side.push_back(std::abs(lap_R / k.expo) / normalizer);
  }
  out.slope = loglog_slope(out.steps, out.residual);
  out.final_value = out.residual.back();
  return out;
}

CorkscrewPoint corkscrew_point(const SpatialIndex& index, std::span<const double> q,
                               double r, std::size_t budget) {
  const int n = index.dim();

  // Work in ball-normalized coordinates y = (x - Q)/r so the search visits
  // identical configurations under affine rescaling of the cloud.
  auto delta_at = [&](const VecN& y) {
    VecN x{};
    for (int a = 0; a < n; ++a) x[a] = q[a] + r * y[a];
    return index.nearest({x.data(), static_cast<std::size_t>(n)});
  };

  Halton seq(n);
  VecN best_y{};
  double best_delta = -1.0;
  for (std::size_t i = 0; i < budget; ++i) {
    const VecN y = seq.next_in_unit_ball();
    const auto nn = delta_at(y);
    if (nn.dist > best_delta) {
      best_delta = nn.dist;
      best_y = y;
    }
  }

  // Local ascent: step away from the current nearest support point, clipped
  // to the unit ball; halve the step on failure.
  double step = 0.25;
  for (int iter = 0; iter < 200 && step > 1e-9; ++iter) {
    const auto nn = delta_at(best_y);
    const auto p = index.point_by_id(nn.id);
    VecN dir{};
    for (int a = 0; a < n; ++a) dir[a] = q[a] + r * best_y[a] - p[a];
    const double len = norm(dir, n);
    if (len < 1e-14 * r) break;
    for (int a = 0; a < n; ++a) dir[a] /= len;

    VecN cand{};
    for (int a = 0; a < n; ++a) cand[a] = best_y[a] + step * dir[a];
    const double cn = norm(cand, n);
    if (cn > 1.0)
      for (int a = 0; a < n; ++a) cand[a] /= cn;
    const double cd = delta_at(cand).dist;
    if (cd > best_delta) {
      best_delta = cd;
      best_y = cand;
    } else {
      step *= 0.5;
    }
  }

  CorkscrewPoint out;
  out.q = make_vec(q);
  out.r = r;
  for (int a = 0; a < n; ++a) out.a[a] = q[a] + r * best_y[a];
  out.delta_a = best_delta;
  out.m_emp = r / best_delta;
  if (out.delta_a < r / 64.0)
    throw std::runtime_error("corkscrew: geometry too tight (delta(A) < r/64 after budget)");
  return out;
}

OmegaSurrogateProfile omega_surrogate(const FieldEvaluator& eval, std::span<const double> q,
                                      std::span<const double> radii,
                                      std::size_t corkscrew_budget) {
  const int n = eval.kernel().n;
  OmegaSurrogateProfile prof;
  bool first = true;
  for (const double r : radii) {
    OmegaSurrogateRow row;
    row.r = r;
    row.a = corkscrew_point(eval.index(), q, r, corkscrew_budget);
    const FieldEval e = eval.eval({row.a.a.data(), static_cast<std::size_t>(n)});
    row.d_at_a = e.D;
    row.value = e.D / r;
    if (first) {
      prof.vmin = prof.vmax = row.value;
      first = false;
    }
    prof.vmin = std::min(prof.vmin, row.value);
    prof.vmax = std::max(prof.vmax, row.value);
    prof.rows.push_back(row);
  }
  return prof;
}

PoissonPrediction poisson_prediction(const FieldEvaluator& eval, const MagicConfig& mc,
                                     std::span<const double> q, double eta,
                                     std::span<const double> probe_radii,
                                     std::size_t per_scale_count, Rng rng) {
  const double rd = std::round(mc.d);
  if (std::abs(mc.d - rd) > 1e-12)
    throw std::domain_error("poisson_prediction: needs integer d");
  const int d = static_cast<int>(rd);

  std::vector<double> dens_radii(probe_radii.begin(), probe_radii.end());
  const DensityProfile prof = density_estimate(eval.measure(), eval.index(), q, dens_radii);
  if (!prof.has_density)
    throw std::domain_error("poisson_prediction: no density plateau at Q");

  ConeSpec cone;
  cone.q = make_vec(q);
  cone.eta = eta;
  cone.rmax = probe_radii.front();
  const NTProbe probe = nt_probe(eval, cone, probe_radii, per_scale_count, rng);
  if (probe.verdict != Verdict::kConverged)
    throw std::domain_error("poisson_prediction: cone probe did not converge at Q");

  PoissonPrediction out;
  out.nt_limit = probe.limit_estimate;
  out.l_pow = std::pow(probe.limit_estimate, -(mc.n - d - 2.0));
  out.theta = prof.density;
  out.ratio = out.l_pow / out.theta;
  return out;
}

}  // namespace rdlab

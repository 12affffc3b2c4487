#include "rdlab/field.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rdlab {

namespace {

// Per-interaction factors of the kernel |z|^(-q):
//   A = w * r^(-q)            (value)
//   B = w * q * r^(-q-2)      (gradient:  grad += -B z)
//   C = w * q(q+2) * r^(-q-4) (Hessian:   hess += C z z^T - B I)
struct KernelCtx {
  double q;
  double qq2;     // q*(q+2)
  int iq;         // q as a small integer, or -1
  double pow_e;   // -(q+4)/2 for the generic path

  explicit KernelCtx(const KernelParams& k) {
    q = k.q();
    qq2 = q * (q + 2.0);
    const double rq = std::round(q);
    iq = (std::abs(q - rq) < 1e-12 && rq >= 1.0 && rq <= 16.0) ? static_cast<int>(rq) : -1;
    pow_e = -0.5 * (q + 4.0);
  }

  // r^(-q-4) with cheap paths for small integer q.
  double inv_pow_q4(double r2) const {
    if (iq > 0) {
      const int e2 = (iq + 4) / 2;  // floor
      double acc = r2;
      for (int i = 1; i < e2; ++i) acc *= r2;
      if (iq & 1) acc *= std::sqrt(r2);
      return 1.0 / acc;
    }
    return std::pow(r2, pow_e);
  }
};

inline void accumulate_point(const KernelCtx& ctx, std::span<const double> x,
                             const double* p, double w, int n, RawField& acc) {
  VecN z{};
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) {
    z[a] = x[a] - p[a];
    r2 += z[a] * z[a];
  }
  const double P = ctx.inv_pow_q4(r2);
  const double Pr2 = P * r2;
  const double B = w * ctx.q * Pr2;
  const double A = w * Pr2 * r2;
  const double C = w * ctx.qq2 * P;
  acc.R += A;
  for (int a = 0; a < n; ++a) acc.gradR[a] -= B * z[a];
  for (int a = 0; a < n; ++a) {
    double* row = acc.hessR.data() + a * kMaxDim;
    const double cza = C * z[a];
    for (int b = a; b < n; ++b) row[b] += cza * z[b];
    row[a] -= B;
  }
}

// Upper triangle is accumulated; mirror once at the end.
void mirror_hess(RawField& f, int n) {
  for (int a = 1; a < n; ++a)
    for (int b = 0; b < a; ++b)
      f.hessR[a * kMaxDim + b] = f.hessR[b * kMaxDim + a];
}

// Pairwise (cascade) summation keeps round-off near eps*log(count) on
// million-term sums.
RawField direct_range(const PointMeasure& m, const KernelCtx& ctx,
                      std::span<const double> x, std::size_t lo, std::size_t hi) {
  RawField acc;
  const int n = m.ambient_dim;
  if (hi - lo <= 64) {
    const double* base = m.coords.data();
    for (std::size_t i = lo; i < hi; ++i)
      accumulate_point(ctx, x, base + i * n, m.weights[i], n, acc);
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  acc = direct_range(m, ctx, x, lo, mid);
  acc.add(direct_range(m, ctx, x, mid, hi), n);
  return acc;
}

}  // namespace

RawField accumulate_direct(const PointMeasure& m, const KernelParams& k,
                           std::span<const double> x) {
  k.check();
  KernelCtx ctx(k);
  RawField f = direct_range(m, ctx, x, 0, m.count());
  mirror_hess(f, m.ambient_dim);
  return f;
}

double tail_estimate(const PointMeasure& m, const KernelParams& k) {
  if (!m.truncated) return 0.0;
  // Dyadic-annuli bound on the omitted far field: the ideal set past the
  // window lies at distance >= extent/2 from interior queries, and each
  // annulus carries at most reg_upper * (2^(j+1) rho)^d of mass.
  const double rho = 0.5 * m.extent;
  const double geo = 1.0 / (1.0 - std::pow(2.0, -k.expo));
  return m.reg_upper * std::pow(2.0, m.hausdorff_dim) * std::pow(rho, -k.expo) * geo;
}

FieldEval assemble_field(const RawField& raw, const KernelParams& k, double delta,
                         double kappa_h, double tail_bound) {
  FieldEval e;
  e.R = raw.R;
  e.gradR = raw.gradR;
  e.hessR = raw.hessR;
  e.delta = delta;
  e.resolved = delta >= kappa_h;
  e.tail_bound = tail_bound;

  const int n = k.n;
  const double b = k.expo;
  e.D = std::pow(raw.R, -1.0 / b);

  // gradD = -(1/b) R^(-1/b-1) gradR
  const double g1 = -std::pow(raw.R, -1.0 / b - 1.0) / b;
  for (int a = 0; a < n; ++a) e.gradD[a] = g1 * raw.gradR[a];

  const double grad2 = norm2(raw.gradR, n);
  e.normGradD_sq = std::pow(raw.R, -2.0 / b - 2.0) * grad2 / (b * b);

  // d_i(|gradD|^2) = -(1/b^2)((2+2b)/b) R^(-2/b-3) d_iR |gradR|^2
  //                + (2/b^2) R^(-2/b-2) sum_j d_jR d_i d_jR
  const double t1 = -((2.0 + 2.0 * b) / b) * std::pow(raw.R, -2.0 / b - 3.0) / (b * b);
  const double t2 = 2.0 * std::pow(raw.R, -2.0 / b - 2.0) / (b * b);
  for (int i = 0; i < n; ++i) {
    double hg = 0.0;
    for (int j = 0; j < n; ++j) hg += raw.gradR[j] * raw.hessR[i * kMaxDim + j];
    e.grad_normGradD_sq[i] = t1 * raw.gradR[i] * grad2 + t2 * hg;
  }

  e.F = delta * norm(e.grad_normGradD_sq, n);
  const double ng = std::sqrt(e.normGradD_sq);
  if (ng > 1e-10) {
    e.Ftilde = e.F / (2.0 * ng);
    e.ftilde_defined = true;
  } else {
    e.Ftilde = std::numeric_limits<double>::quiet_NaN();
    e.ftilde_defined = false;
  }
  return e;
}

TreeCode::TreeCode(const SpatialIndex& index, const KernelParams& k, double theta)
    : index_(index), k_(k), theta_(theta) {
  k.check();
  if (theta < 0.0 || theta > 0.7)
    throw std::invalid_argument("treecode: opening parameter must be in [0, 0.7]");
}

RawField TreeCode::accumulate(std::span<const double> x, double* err_bound_R) const {
  const KernelCtx ctx(k_);
  const int n = index_.dim();
  RawField acc;
  double err = 0.0;

  struct Frame {
    std::int32_t node;
  };
  std::vector<Frame> stack;
  stack.push_back({0});
  const auto& nodes = index_.nodes();
  while (!stack.empty()) {
    const auto& node = nodes[stack.back().node];
    stack.pop_back();
    // Open unless the node is small seen from x: diam <= theta * dist, with
    // dist taken to the near face of the bounding box (conservative).
    const double dist_box = std::sqrt(node.box.min_dist2(x));
    const bool far = 2.0 * node.radius <= theta_ * dist_box && node.weight > 0.0;
    if (far) {
      accumulate_point(ctx, x, node.centroid.data(), node.weight, n, acc);
      // Dipole about the weighted centroid vanishes; the first omitted term
      // is quadratic. |hess h| <= q(q+1)|z|^(-q-2) on the segment.
      const double dmin = dist_box;
      err += 0.5 * ctx.q * (ctx.q + 1.0) * node.weight * node.radius * node.radius *
             std::pow(dmin, -(ctx.q + 2.0));
      continue;
    }
    if (node.leaf()) {
      for (std::uint32_t i = node.begin; i < node.end; ++i)
        accumulate_point(ctx, x, index_.point(i).data(), index_.weight(i), n, acc);
    } else {
      stack.push_back({node.right});
      stack.push_back({node.left});
    }
  }
  mirror_hess(acc, n);
  if (err_bound_R) *err_bound_R = err;
  return acc;
}

FieldEvaluator::FieldEvaluator(const PointMeasure& m, const SpatialIndex& index,
                               KernelParams k, double kappa, double theta)
    : m_(&m), index_(&index), k_(k), kappa_(kappa), theta_(theta) {
  k_.check();
  if (k_.n != m.ambient_dim) throw std::invalid_argument("evaluator: dimension mismatch");
  if (theta_ > 0.0) tree_.emplace(index, k_, theta_);
  tail_ = tail_estimate(m, k_);
}

FieldEval FieldEvaluator::finish(const RawField& raw, std::span<const double> x,
                                 double tree_bound) const {
  const double delta = index_->nearest(x).dist;
  if (delta < m_->spacing / 10.0)
    throw std::domain_error("field: singular query (coincides with a support point)");
  FieldEval e = assemble_field(raw, k_, delta, kappa_h(), tail_);
  e.tree_bound_R = tree_bound;
  return e;
}

FieldEval FieldEvaluator::eval_direct(std::span<const double> x) const {
  return finish(accumulate_direct(*m_, k_, x), x, 0.0);
}

FieldEval FieldEvaluator::eval_tree(std::span<const double> x) const {
  if (!tree_) {
    TreeCode t(*index_, k_, 0.0);
    double err = 0.0;
    return finish(t.accumulate(x, &err), x, err);
  }
  double err = 0.0;
  const RawField raw = tree_->accumulate(x, &err);
  return finish(raw, x, err);
}

FieldEval FieldEvaluator::eval(std::span<const double> x) const {
  return uses_tree() ? eval_tree(x) : eval_direct(x);
}

std::vector<FiniteDiffReport> finite_diff_check(const FieldEvaluator& eval,
                                                std::span<const double> x,
                                                std::span<const double> step_fractions) {
  const int n = eval.kernel().n;
  const FieldEval at = eval.eval(x);
  if (!at.resolved) throw std::domain_error("finite_diff_check: query unresolved");

  std::vector<FiniteDiffReport> out;
  for (const double frac : step_fractions) {
    const double s = frac * at.delta;
    FiniteDiffReport rep;
    rep.step = s;
    VecN xp = make_vec(x), xm = make_vec(x);
    for (int a = 0; a < n; ++a) {
      xp[a] += s;
      xm[a] -= s;
      const FieldEval ep = eval.eval(std::span<const double>(xp.data(), n));
      const FieldEval em = eval.eval(std::span<const double>(xm.data(), n));
      if (!ep.resolved || !em.resolved)
        throw std::domain_error("finite_diff_check: stencil touches unresolved region");
      const double fd_R = (ep.R - em.R) / (2.0 * s);
      const double fd_D = (ep.D - em.D) / (2.0 * s);
      const double fd_Ng = (ep.normGradD_sq - em.normGradD_sq) / (2.0 * s);
      rep.err_gradR = std::max(rep.err_gradR,
                               std::abs(fd_R - at.gradR[a]) / std::max(1e-300, std::abs(at.R / at.delta)));
      rep.err_gradD = std::max(rep.err_gradD, std::abs(fd_D - at.gradD[a]));
      rep.err_gradNg2 = std::max(rep.err_gradNg2,
                                 std::abs(fd_Ng - at.grad_normGradD_sq[a]) * at.delta);
      xp[a] = x[a];
      xm[a] = x[a];
    }
    out.push_back(rep);
  }
  return out;
}

double loglog_slope(std::span<const double> steps, std::span<const double> errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(errs[i] > 0.0) || !std::isfinite(errs[i])) continue;
    const double lx = std::log(steps[i]);
    const double ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace rdlab

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rdlab/geometry.hpp"
#include "rdlab/kernel.hpp"
#include "rdlab/point_measure.hpp"
#include "rdlab/spatial_index.hpp"

namespace rdlab {

// Raw kernel sums at a query point: R and its first two derivative tensors.
struct RawField {
  double R = 0;
  VecN gradR{};
  MatN hessR{};  // n x n, row-major

  void add(const RawField& o, int n) {
    R += o.R;
    for (int i = 0; i < n; ++i) gradR[i] += o.gradR[i];
    for (int i = 0; i < n * n; ++i) hessR[i] += o.hessR[i];
  }
};

// The full bundle derived from the kernel sums at one query point.
struct FieldEval {
  double R = 0;
  VecN gradR{};
  MatN hessR{};
  double D = 0;
  VecN gradD{};
  double normGradD_sq = 0;
  VecN grad_normGradD_sq{};
  double F = 0;
  double Ftilde = 0;       // defined only when ftilde_defined
  bool ftilde_defined = true;
  double delta = 0;        // cloud distance used for F and for the resolution flag
  bool resolved = false;   // delta >= kappa * h
  double tail_bound = 0;   // far-field truncation estimate on R (never added)
  double tree_bound_R = 0; // accumulated monopole error bound (tree path only)

  double norm_gradD(int n) const { return norm(gradD, n); }
};

// Direct kernel summation with pairwise (cascade) accumulation.
RawField accumulate_direct(const PointMeasure& m, const KernelParams& k,
                           std::span<const double> x);

// Assembles D, gradD, |gradD|^2, its gradient, F and Ftilde from raw sums.
FieldEval assemble_field(const RawField& raw, const KernelParams& k, double delta,
                         double kappa_h, double tail_bound);

// Far-field tail estimate for a truncated window (dyadic-annuli bound).
double tail_estimate(const PointMeasure& m, const KernelParams& k);

// Barnes-Hut style evaluator: per-node monopole about the weighted centroid
// (whose dipole moment vanishes identically), opening rule
// diam <= theta * dist(x, centroid). theta = 0 opens every node and
// reproduces direct summation up to summation order.
class TreeCode {
 public:
  TreeCode(const SpatialIndex& index, const KernelParams& k, double theta);

  double theta() const { return theta_; }

  // Raw sums plus an accumulated error bound on R.
  RawField accumulate(std::span<const double> x, double* err_bound_R = nullptr) const;

 private:
  const SpatialIndex& index_;
  KernelParams k_;
  double theta_ = 0;
};

// Shared entry point for both summation paths. Holds the measure, its index,
// the kernel and the resolution policy.
class FieldEvaluator {
 public:
  FieldEvaluator(const PointMeasure& m, const SpatialIndex& index, KernelParams k,
                 double kappa = 5.0, double theta = 0.0);

  const PointMeasure& measure() const { return *m_; }
  const SpatialIndex& index() const { return *index_; }
  const KernelParams& kernel() const { return k_; }
  double kappa() const { return kappa_; }
  double kappa_h() const { return kappa_ * m_->spacing; }
  bool uses_tree() const { return theta_ > 0.0; }

  double delta(std::span<const double> x) const { return index_->nearest(x).dist; }

  // Throws std::domain_error when x is within h/10 of a support point.
  FieldEval eval(std::span<const double> x) const;       // configured path
  FieldEval eval_direct(std::span<const double> x) const;
  FieldEval eval_tree(std::span<const double> x) const;  // requires theta > 0 at construction

  // Convenience scalar accessors (configured path).
  double D(std::span<const double> x) const { return eval(x).D; }
  VecN gradD(std::span<const double> x) const { return eval(x).gradD; }

 private:
  FieldEval finish(const RawField& raw, std::span<const double> x, double tree_bound) const;

  const PointMeasure* m_;
  const SpatialIndex* index_;
  KernelParams k_;
  double kappa_;
  double theta_;
  std::optional<TreeCode> tree_;
  double tail_;
};

// Central-difference cross-check of the analytic derivative chain.
struct FiniteDiffReport {
  double step = 0;
  double err_gradR = 0;   // max relative component error
  double err_gradD = 0;
  double err_gradNg2 = 0; // gradient of |gradD|^2
};

// One report per step; steps are fractions of delta(x). Throws if any stencil
// point is unresolved.
std::vector<FiniteDiffReport> finite_diff_check(const FieldEvaluator& eval,
                                                std::span<const double> x,
                                                std::span<const double> step_fractions);

// Least-squares slope of log(err) against log(step).
double loglog_slope(std::span<const double> steps, std::span<const double> errs);

}  // namespace rdlab

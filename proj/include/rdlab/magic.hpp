#pragma once

#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/nt_limits.hpp"

namespace rdlab {

// The exponent at which R becomes the Newtonian potential of the measure and
// D solves the weighted equation div(D^-(n-d-1) grad D) = 0 off the set.
double magic_alpha(int n, double d);

struct MagicConfig {
  int n = 0;
  double d = 0;

  MagicConfig(int n_, double d_) : n(n_), d(d_) { (void)magic_alpha(n, d); }
  double alpha() const { return magic_alpha(n, d); }
  KernelParams kernel() const { return KernelParams{n, d, alpha()}; }
  double weight_exponent() const { return n - d - 1.0; }
};

struct ResidualLadder {
  std::vector<double> steps;      // FD step sizes (fractions of delta)
  std::vector<double> residual;   // |FD Laplacian R| * delta^2 / R
  double slope = 0;               // log-log fit
  double final_value = 0;         // residual at the smallest step
};

// Central-difference Laplacian of R on a geometric step ladder, normalized by
// R/delta^2. Steps are fractions of delta(x); the whole stencil must stay
// resolved.
ResidualLadder laplacian_R_residual(const FieldEvaluator& eval, std::span<const double> x,
                                    std::span<const double> step_fractions);

inline std::vector<double> default_fd_ladder() {
  return {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
}

struct OperatorResidual {
  std::vector<double> steps;
  std::vector<double> residual;        // |FD div(D^-(n-d-1) grad D)| normalized
  std::vector<double> laplacian_side;  // |(1/alpha) FD Laplacian R| same normalization
  double slope = 0;
  double final_value = 0;
};

// FD divergence of the weighted gradient D^-(n-d-1) grad D (analytic fields
// at the stencil points), normalized by D^-(n-d-1) D / delta^2. The
// Laplacian route (1/alpha) Delta R is reported alongside; at the magic
// exponent the two integrands agree pointwise.
OperatorResidual operator_residual(const FieldEvaluator& eval, std::span<const double> x,
                                   std::span<const double> step_fractions);

struct CorkscrewPoint {
  VecN q{};
  double r = 0;
  VecN a{};
  double delta_a = 0;
  double m_emp = 0;  // r / delta(A) >= 1
};

// Quasi-random search plus local ascent for a point of B(Q,r) far from the
// cloud. The search runs in ball-normalized coordinates so results transport
// exactly under affine rescaling. Throws when delta(A) < r/64 after the
// budget (geometry too tight).
CorkscrewPoint corkscrew_point(const SpatialIndex& index, std::span<const double> q,
                               double r, std::size_t budget = 4096);

struct OmegaSurrogateRow {
  double r = 0;
  CorkscrewPoint a;
  double d_at_a = 0;
  double value = 0;  // D(A_r(Q)) / r
};

struct OmegaSurrogateProfile {
  std::vector<OmegaSurrogateRow> rows;
  double vmin = 0, vmax = 0;
};

// Harmonic-measure surrogate profile r^(d-1) D(A_r(Q)) / r^d = D(A_r(Q))/r
// over dyadic radii.
OmegaSurrogateProfile omega_surrogate(const FieldEvaluator& eval, std::span<const double> q,
                                      std::span<const double> radii,
                                      std::size_t corkscrew_budget = 4096);

struct PoissonPrediction {
  double nt_limit = 0;       // L = non-tangential limit of |grad D| at Q
  double l_pow = 0;          // L^-(n-d-2)
  double theta = 0;          // d-density at Q
  double ratio = 0;          // l_pow / theta; predicted constant across Q
};

// Refuses (throws std::domain_error) unless the density has a plateau at Q
// and the cone probe converges there.
PoissonPrediction poisson_prediction(const FieldEvaluator& eval, const MagicConfig& mc,
                                     std::span<const double> q, double eta,
                                     std::span<const double> probe_radii,
                                     std::size_t per_scale_count, Rng rng);

}  // namespace rdlab

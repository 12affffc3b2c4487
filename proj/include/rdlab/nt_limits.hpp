#pragma once

#include <string>
#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/plane_fit.hpp"
#include "rdlab/rng.hpp"

namespace rdlab {

// Non-tangential approach region at Q: points of the complement with
// dist(x, E) >= eta * |x - Q|, below an outer radius.
struct ConeSpec {
  VecN q{};
  double eta = 0.5;   // aperture in (0,1)
  double rmax = 0;    // outer radius
};

enum class Verdict { kConverged, kOscillating, kUnresolved };

std::string to_string(Verdict v);

struct ConeScaleSample {
  double radius = 0;            // samples live in the shell [radius/2, radius]
  std::vector<VecN> points;
  bool resolved = false;        // enough accepted samples at this scale
};

// Rejection sampling in the cone shell; every accepted point satisfies both
// cone inequalities and the resolution floor.
ConeScaleSample cone_sample(const SpatialIndex& index, const ConeSpec& cone, double radius,
                            std::size_t per_scale_count, Rng rng, double kappa_h);

struct NTScaleStats {
  double radius = 0;
  double mean = 0;
  double osc = 0;         // max - min of |grad D| over the scale's samples
  std::size_t samples = 0;
  bool resolved = false;
};

struct NTProbe {
  std::vector<NTScaleStats> scales;
  Verdict verdict = Verdict::kUnresolved;
  double limit_estimate = 0;   // meaningful when verdict == kConverged
  double tol_rel = 0.02;       // convergence calibration, not a theorem
};

// Per-scale statistics of |grad D| over cone samples; CONVERGED requires the
// last three resolved scales to agree within the calibration tolerance.
NTProbe nt_probe(const FieldEvaluator& eval, const ConeSpec& cone,
                 std::span<const double> radii, std::size_t per_scale_count, Rng rng,
                 double tol_rel = 0.02);

struct DensityProfile {
  std::vector<double> radii;
  std::vector<double> theta;   // mu(B(Q,r)) / (V_d r^d)
  bool has_density = false;    // plateau over the last octave
  double density = 0;
};

DensityProfile density_estimate(const PointMeasure& m, const SpatialIndex& index,
                                std::span<const double> q, std::span<const double> radii,
                                double plateau_rel = 0.05);

// Expected non-tangential limit of |grad D| at a point of density theta:
// c2(d, expo) * theta^(-1/expo).
double predicted_limit(int d, double expo, double theta);

struct BlowupReport {
  std::vector<double> radii;
  std::vector<double> discrepancy;  // sup over the probe grid per radius
  PlaneFrame plane;
  double density = 0;
  bool monotone_decreasing = false;
  bool aborted = false;
  std::string abort_reason;
};

// Sup over a fixed compact probe grid (unit shell, kept clear of the fitted
// plane) of |D(r y + Q)/r - c2 theta^(-1/expo) dist(y, P)| per radius.
BlowupReport blowup_compare(const FieldEvaluator& eval, std::span<const double> q,
                            std::span<const double> radii, std::size_t probe_count = 64,
                            double plane_clearance = 0.25);

}  // namespace rdlab

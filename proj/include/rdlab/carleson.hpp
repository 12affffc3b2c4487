#pragma once

#include <vector>

#include "rdlab/field.hpp"
#include "rdlab/whitney.hpp"

namespace rdlab {

// One window's normalized sum, plus the quadrature bookkeeping.
struct CarlesonEntry {
  CarlesonWindow window;
  double value = 0;         // S(X, Rad) / Rad^d
  std::size_t cells = 0;    // emitted cells whose center lies in the ball
  std::size_t unresolved = 0;
  double unresolved_frac = 0;
};

// Grid of windows with the running sup; the sup over a finite grid is a
// lower bound for the true Carleson norm.
struct CarlesonReport {
  std::vector<CarlesonEntry> entries;
  double sup = 0;

  void add(const CarlesonEntry& e) {
    entries.push_back(e);
    if (e.value > sup) sup = e.value;
  }
};

// Midpoint Whitney quadrature of F^2 delta^(d-n) over the window ball,
// normalized by Rad^d. Unresolved cells are skipped and tallied.
CarlesonEntry carleson_sum_F(const FieldEvaluator& eval, const CarlesonWindow& window,
                             int max_depth = 48);

// Same quadrature with integrand 1{F > eps} delta^(d-n): the normalized
// measure of the super-level set of F in the window.
CarlesonEntry carleson_mass_Z(const FieldEvaluator& eval, double eps,
                              const CarlesonWindow& window, int max_depth = 48);

// Quadrature of the constant integrand 1 (sanity for the measure
// delta^(d-n) dx itself; value depends on the resolution floor).
CarlesonEntry carleson_volume(const FieldEvaluator& eval, const CarlesonWindow& window,
                              int max_depth = 48);

// Dyadic window grid over support-point centers.
std::vector<CarlesonWindow> window_grid(const PointMeasure& m, const SpatialIndex& index,
                                        std::size_t num_centers, int num_radii,
                                        double max_radius, Rng rng, double kappa = 5.0);

}  // namespace rdlab

#include "rdlab/carleson.hpp"

#include <cmath>
#include <functional>

namespace rdlab {

namespace {

CarlesonEntry sum_over_cells(const FieldEvaluator& eval, const CarlesonWindow& window,
                             int max_depth,
                             const std::function<double(const FieldEval&)>& integrand) {
  const auto& k = eval.kernel();
  const int n = k.n;
  CarlesonEntry entry;
  entry.window = window;
  const auto cells = whitney_decompose(eval.index(), window, eval.kappa_h(), max_depth);
  double sum = 0.0;
  for (const auto& cell : cells) {
    ++entry.cells;
    if (!cell.resolved) {
      ++entry.unresolved;
      continue;
    }
    const FieldEval f = eval.eval({cell.center.data(), static_cast<std::size_t>(n)});
    if (!f.resolved) {
      ++entry.unresolved;
      continue;
    }
    const double dens = integrand(f);
    if (dens == 0.0) continue;
    sum += dens * std::pow(cell.delta, k.d - n) * std::pow(cell.side, n);
  }
  entry.value = sum / std::pow(window.radius, k.d);
  entry.unresolved_frac =
      entry.cells ? static_cast<double>(entry.unresolved) / static_cast<double>(entry.cells) : 0.0;
  return entry;
}

}  // namespace

CarlesonEntry carleson_sum_F(const FieldEvaluator& eval, const CarlesonWindow& window,
                             int max_depth) {
  return sum_over_cells(eval, window, max_depth,
                        [](const FieldEval& f) { return f.F * f.F; });
}

CarlesonEntry carleson_mass_Z(const FieldEvaluator& eval, double eps,
                              const CarlesonWindow& window, int max_depth) {
  return sum_over_cells(eval, window, max_depth,
                        [eps](const FieldEval& f) { return f.F > eps ? 1.0 : 0.0; });
}

CarlesonEntry carleson_volume(const FieldEvaluator& eval, const CarlesonWindow& window,
                              int max_depth) {
  return sum_over_cells(eval, window, max_depth, [](const FieldEval&) { return 1.0; });
}

std::vector<CarlesonWindow> window_grid(const PointMeasure& m, const SpatialIndex& index,
                                        std::size_t num_centers, int num_radii,
                                        double max_radius, Rng rng, double kappa) {
  (void)index;
  std::vector<CarlesonWindow> grid;
  const double r_floor = kappa * m.spacing * 32.0;  // window radii need headroom over the cell floor
  Rng stream = rng.stream("carleson-windows");
  num_centers = std::min<std::size_t>(num_centers, m.count());
  for (std::size_t c = 0; c < num_centers; ++c) {
    const std::size_t id = stream.uniform_index(m.count());
    double r = max_radius;
    for (int j = 0; j < num_radii && r >= r_floor; ++j, r *= 0.5) {
      CarlesonWindow w;
      w.center = make_vec(m.point(id));
      w.radius = r;
      grid.push_back(w);
    }
  }
  return grid;
}

}  // namespace rdlab

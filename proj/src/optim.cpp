#include "rdlab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rdlab {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, std::vector<double> initial_step,
                             int max_iter, double ftol) {
  const std::size_t n = x0.size();
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += initial_step[i];
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  NelderMeadResult res;
  std::vector<std::size_t> ord(n + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      if (vals[a] != vals[b]) return vals[a] < vals[b];
      return a < b;
    });
    const std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];
    res.iterations = iter;
    if (std::abs(vals[worst] - vals[best]) <=
        ftol * (std::abs(vals[best]) + std::abs(vals[worst]) + 1e-300)) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (pts[worst][j] - centroid[j]);
      return x;
    };

    const std::vector<double> xr = blend(-alpha);
    const double fr = f(xr);
    if (fr < vals[ord[0]]) {
      const std::vector<double> xe = blend(-gamma);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const std::vector<double> xc = blend(fr < vals[worst] ? -rho : rho);
    const double fc = f(xc);
    if (fc < std::min(fr, vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        pts[i][j] = pts[best][j] + sigma * (pts[i][j] - pts[best][j]);
      vals[i] = f(pts[i]);
    }
  }

  std::size_t arg = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (vals[i] < vals[arg]) arg = i;
  res.x = pts[arg];
  res.value = vals[arg];
  return res;
}

}  // namespace rdlab

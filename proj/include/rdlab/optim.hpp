#pragma once

#include <functional>
#include <vector>

namespace rdlab {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

// Standard Nelder-Mead downhill simplex, deterministic given the seed point.
// Used for the derivative-free local refinements (plane tilts, densities).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, std::vector<double> initial_step,
                             int max_iter = 200, double ftol = 1e-10);

}  // namespace rdlab

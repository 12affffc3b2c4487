#pragma once

#include <stdexcept>

namespace rdlab {

// Exponent data of the kernel |z|^(-d-expo) and of the derived regularized
// distance D = R^(-1/expo).
struct KernelParams {
  int n = 0;         // ambient dimension
  double d = 0;      // Hausdorff dimension of the measure, 0 < d < n
  double expo = 0;   // alpha (or beta) > 0
  double q() const { return d + expo; }

  void check() const {
    if (n < 2) throw std::invalid_argument("kernel: ambient dimension must be >= 2");
    if (!(d > 0.0) || !(d < n)) throw std::invalid_argument("kernel: need 0 < d < n");
    if (!(expo > 0.0)) throw std::invalid_argument("kernel: exponent must be positive");
  }
};

struct FlatConstants {
  double c1 = 0;  // integral of (1+|u|^2)^(-(d+expo)/2) over R^d
  double c2 = 0;  // c1^(-1/expo); slope of D for a unit-density flat measure
};

// c1 by adaptive radial quadrature (tanh-sinh on the compactified radial
// integral), c2 = c1^(-1/expo). Requires integer d >= 1.
FlatConstants flat_constants(int d, double expo, double rel_tol = 1e-13);

// Lebesgue volume of the unit d-ball; the density normalization used by all
// density estimates.
double unit_ball_volume(int d);

// Surface measure of the unit (d-1)-sphere in R^d.
double unit_sphere_area(int d);

// Generic tanh-sinh quadrature of f on (a, b); tolerates integrable endpoint
// singularities.
double tanh_sinh(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double rel_tol = 1e-13, int max_level = 12);

}  // namespace rdlab

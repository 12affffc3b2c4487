#include "rdlab/kernel.hpp"

#include <cmath>
#include <vector>

namespace rdlab {

double unit_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("unit_sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

// Tanh-sinh (double exponential) nodes handle the integrable endpoint
// singularities that appear for exponents < 1.
double tanh_sinh(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double rel_tol, int max_level) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double t_max = 3.8;  // tanh(pi/2*sinh(3.8)) is 1 within double precision

  auto node = [&](double t, double& x, double& w) {
    const double s = std::sinh(t);
    const double c = std::cosh(t);
    const double u = std::tanh(0.5 * M_PI * s);
    x = mid + half * u;
    const double sech = 1.0 / std::cosh(0.5 * M_PI * s);
    w = half * 0.5 * M_PI * c * sech * sech;
  };

  double h = 1.0;
  double x, w;
  node(0.0, x, w);
  double sum = f(x, ctx) * w;
  double prev = sum * h;
  double integral = prev;

  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    // New nodes at odd multiples of the refined step.
    for (double t = h; t <= t_max; t += 2.0 * h) {
      for (const double tt : {t, -t}) {
        node(tt, x, w);
        if (x <= a || x >= b || w == 0.0) continue;
        const double v = f(x, ctx);
        if (std::isfinite(v)) add += v * w;
      }
    }
    sum += add;
    integral = sum * h;
    if (level >= 3 && std::abs(integral - prev) <= rel_tol * std::abs(integral))
      return integral;
    prev = integral;
  }
  return integral;
}

namespace {

struct RadialCtx {
  double d;
  double expo;
};

// Radial integrand after s = tan(phi): sin^(d-1) * cos^(expo-1) on (0, pi/2).
double radial_integrand(double phi, const void* ctx) {
  const auto* c = static_cast<const RadialCtx*>(ctx);
  const double s = std::sin(phi);
  const double co = std::cos(phi);
  return std::pow(s, c->d - 1.0) * std::pow(co, c->expo - 1.0);
}

}  // namespace

FlatConstants flat_constants(int d, double expo, double rel_tol) {
  if (d < 1) throw std::invalid_argument("flat_constants: d must be a positive integer");
  if (!(expo > 0.0)) throw std::invalid_argument("flat_constants: exponent must be positive");
  RadialCtx ctx{static_cast<double>(d), expo};
  const double radial = tanh_sinh(&radial_integrand, &ctx, 0.0, 0.5 * M_PI, rel_tol);
  if (!(radial > 0.0) || !std::isfinite(radial))
    throw std::runtime_error("flat_constants: quadrature non-convergence");
  FlatConstants out;
  out.c1 = unit_sphere_area(d) * radial;
  out.c2 = std::pow(out.c1, -1.0 / expo);
  return out;
}

}  // namespace rdlab

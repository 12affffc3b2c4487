#include <doctest.h>

#include <cmath>

#include "rdlab/field.hpp"
#include "rdlab/kernel.hpp"
#include "rdlab/point_measure.hpp"

using namespace rdlab;

TEST_CASE("flat constants against closed forms") {
  // (1,1): arctan antiderivative gives pi; (1,2): 2; (2,2): pi.
  CHECK(flat_constants(1, 1.0).c1 == doctest::Approx(M_PI).epsilon(1e-11));
  CHECK(flat_constants(1, 1.0).c2 == doctest::Approx(1.0 / M_PI).epsilon(1e-11));
  CHECK(flat_constants(1, 2.0).c1 == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(flat_constants(1, 2.0).c2 == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-11));
  CHECK(flat_constants(2, 2.0).c1 == doctest::Approx(M_PI).epsilon(1e-11));
  CHECK(flat_constants(2, 2.0).c2 == doctest::Approx(std::pow(M_PI, -0.5)).epsilon(1e-11));

  // Beta-function cross-check for a fractional exponent and higher d.
  auto beta_form = [](int d, double e) {
    return std::pow(M_PI, 0.5 * d) * std::tgamma(0.5 * e) / std::tgamma(0.5 * (d + e));
  };
  CHECK(flat_constants(1, 0.5).c1 == doctest::Approx(beta_form(1, 0.5)).epsilon(1e-10));
  CHECK(flat_constants(3, 1.5).c1 == doctest::Approx(beta_form(3, 1.5)).epsilon(1e-10));
}

TEST_CASE("two points at +-e1: R = 2w at the origin") {
  PointMeasure m;
  m.ambient_dim = 2;
  m.hausdorff_dim = 1.0;
  m.coords = {1.0, 0.0, -1.0, 0.0};
  m.weights = {0.7, 0.7};
  m.spacing = 0.5;
  m.total_mass = 1.4;
  m.extent = 1.0;
  const SpatialIndex index(m);
  for (double expo : {0.5, 1.0, 2.0, 3.5}) {
    FieldEvaluator eval(m, index, KernelParams{2, 1.0, expo});
    const double x[2] = {0.0, 0.0};
    CHECK(eval.eval(x).R == doctest::Approx(1.4).epsilon(1e-14));
  }
}

TEST_CASE("flat line closed form: R, D, |gradD|, F") {
  const PointMeasure m = gen_flat_plane(2, 1, 1.0, 100.0, 0.05);
  const SpatialIndex index(m);
  FieldEvaluator eval(m, index, KernelParams{2, 1.0, 1.0});

  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(5.0 * m.spacing, 100.0 / 20.0);
    const double x[2] = {rng.uniform(-2.0, 2.0), t};
    const FieldEval e = eval.eval(x);
    REQUIRE(e.resolved);
    CHECK(e.R * t == doctest::Approx(M_PI).epsilon(5e-3));
    CHECK(e.D / t == doctest::Approx(1.0 / M_PI).epsilon(5e-3));
    CHECK(e.norm_gradD(2) == doctest::Approx(1.0 / M_PI).epsilon(1e-3));
    CHECK(e.F <= 1e-8);
    CHECK(e.tail_bound > 0.0);  // plane windows are truncated
  }
}

TEST_CASE("field bundle invariants: D, gradD, F consistency") {
  const PointMeasure m = gen_four_corner_cantor(5, 1.0, 2);
  const SpatialIndex index(m);
  const KernelParams k{2, 1.0, 1.0};
  FieldEvaluator eval(m, index, k);
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    double x[2] = {rng.uniform(-0.3, 1.3), rng.uniform(-0.3, 1.3)};
    FieldEval e;
    try {
      e = eval.eval(x);
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK(e.D == doctest::Approx(std::pow(e.R, -1.0)).epsilon(1e-12));
    for (int a = 0; a < 2; ++a)
      CHECK(e.gradD[a] ==
            doctest::Approx(-std::pow(e.R, -2.0) * e.gradR[a]).epsilon(1e-12));
    CHECK(e.F == doctest::Approx(e.delta * norm(e.grad_normGradD_sq, 2)).epsilon(1e-12));
    if (e.ftilde_defined)
      CHECK(e.Ftilde == doctest::Approx(e.F / (2.0 * e.norm_gradD(2))).epsilon(1e-12));
  }
}

TEST_CASE("singular query throws; near-support unresolved flag") {
  const PointMeasure m = gen_flat_plane(2, 1, 1.0, 10.0, 0.1);
  const SpatialIndex index(m);
  FieldEvaluator eval(m, index, KernelParams{2, 1.0, 1.0});
  CHECK_THROWS_AS(eval.eval(m.point(3)), std::domain_error);
  const double near[2] = {0.025, 0.12};  // resolved flag off below kappa h = 0.5
  CHECK_FALSE(eval.eval(near).resolved);
}

TEST_CASE("analytic vs finite differences: O(h^2) slopes") {
  // Three test sets; slope of log error vs log step in [1.8, 2.2].
  const PointMeasure line = gen_flat_plane(2, 1, 1.0, 30.0, 0.05);
  const PointMeasure cantor = gen_four_corner_cantor(5, 1.0, 2);
  GraphProfile sine{"sine", 0.2, 1.0};
  const PointMeasure graph = gen_lipschitz_graph(2, 1, sine, 10.0, 1.0 / 64);

  const std::vector<double> fracs{1e-2, 3e-3, 1e-3};
  auto check_measure = [&](const PointMeasure& m, double qx, double qy) {
    const SpatialIndex index(m);
    FieldEvaluator eval(m, index, KernelParams{2, 1.0, 1.0});
    const double x[2] = {qx, qy};
    const auto reports = finite_diff_check(eval, x, fracs);
    std::vector<double> steps, errR, errD, errNg;
    for (const auto& r : reports) {
      steps.push_back(r.step);
      errR.push_back(r.err_gradR);
      errD.push_back(r.err_gradD);
      errNg.push_back(r.err_gradNg2);
    }
    const double sR = loglog_slope(steps, errR);
    const double sD = loglog_slope(steps, errD);
    const double sN = loglog_slope(steps, errNg);
    CHECK(sR == doctest::Approx(2.0).epsilon(0.11));
    CHECK(sD == doctest::Approx(2.0).epsilon(0.11));
    CHECK(sN == doctest::Approx(2.0).epsilon(0.11));
  };
  check_measure(line, 0.3, 1.0);
  check_measure(cantor, 0.5, 0.8);
  check_measure(graph, 0.25, 1.1);
}

TEST_CASE("|gradD| and F bounded over resolved queries (constants logged)") {
  const PointMeasure m = gen_four_corner_cantor(6, 1.0, 2);
  const SpatialIndex index(m);
  FieldEvaluator eval(m, index, KernelParams{2, 1.0, 1.0});
  Rng rng(31);
  double sup_g = 0, sup_F = 0, lo_sand = 1e300, hi_sand = 0;
  int used = 0;
  while (used < 500) {
    double x[2] = {rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
    FieldEval e;
    try {
      e = eval.eval(x);
    } catch (const std::domain_error&) {
      continue;
    }
    if (!e.resolved) continue;
    ++used;
    sup_g = std::max(sup_g, e.norm_gradD(2));
    sup_F = std::max(sup_F, e.F);
    const double sandwich = e.R * e.delta;  // expo = 1
    lo_sand = std::min(lo_sand, sandwich);
    hi_sand = std::max(hi_sand, sandwich);
  }
  CHECK(sup_g < 10.0);
  CHECK(sup_F < 10.0);
  CHECK(lo_sand > 0.0);
  MESSAGE("cantor k=6 sup|gradD|=", sup_g, " supF=", sup_F, " R*delta in [", lo_sand,
          ",", hi_sand, "]");
}

TEST_CASE("pushforward identity: D on blowup vs D on the original") {
  const PointMeasure m = gen_four_corner_cantor(5, 1.0, 2);
  const SpatialIndex im(m);
  const auto q = m.point(123);
  const double r = 0.0625;
  const PointMeasure b = rescale_blowup(m, q, r);
  const SpatialIndex ib(b);
  const KernelParams k{2, 1.0, 1.0};
  FieldEvaluator em(m, im, k), eb(b, ib, k);

  Rng rng(41);
  for (int i = 0; i < 50; ++i) {
    const double y[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const double xy[2] = {r * y[0] + q[0], r * y[1] + q[1]};
    double d_orig;
    try {
      d_orig = em.eval(xy).D;
    } catch (const std::domain_error&) {
      continue;
    }
    const double d_blow = eb.eval(y).D;
    CHECK(std::abs(d_blow - d_orig / r) <= 1e-10 * (d_orig / r));
  }
}

TEST_CASE("scale and rigid-motion equivariance of the fields") {
  const PointMeasure m = gen_four_corner_cantor(4, 1.0, 2);
  const KernelParams k{2, 1.0, 1.5};

  // Rotation + translation of cloud and query leaves R, D, F unchanged.
  const double c = std::cos(0.7), s = std::sin(0.7);
  PointMeasure rot = m;
  for (std::size_t i = 0; i < m.count(); ++i) {
    const auto p = m.point(i);
    rot.coords[2 * i] = c * p[0] - s * p[1] + 3.0;
    rot.coords[2 * i + 1] = s * p[0] + c * p[1] - 1.0;
  }
  const SpatialIndex im(m), ir(rot);
  FieldEvaluator em(m, im, k), er(rot, ir, k);
  Rng rng(53);
  for (int i = 0; i < 40; ++i) {
    const double x[2] = {rng.uniform(-0.4, 1.4), rng.uniform(-0.4, 1.4)};
    const double xr[2] = {c * x[0] - s * x[1] + 3.0, s * x[0] + c * x[1] - 1.0};
    FieldEval a, b;
    try {
      a = em.eval(x);
      b = er.eval(xr);
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK(b.R == doctest::Approx(a.R).epsilon(1e-10));
    CHECK(b.D == doctest::Approx(a.D).epsilon(1e-10));
    CHECK(b.F == doctest::Approx(a.F).epsilon(1e-8));
    CHECK(b.norm_gradD(2) == doctest::Approx(a.norm_gradD(2)).epsilon(1e-10));
  }
}

TEST_CASE("weight scaling law: D scales as s^(-1/expo)") {
  const PointMeasure m = gen_flat_plane(2, 1, 1.0, 20.0, 0.05);
  const PointMeasure m2 = scale_weights(m, 2.0);
  const SpatialIndex i1(m), i2(m2);
  for (double expo : {1.0, 2.0}) {
    FieldEvaluator e1(m, i1, KernelParams{2, 1.0, expo});
    FieldEvaluator e2(m2, i2, KernelParams{2, 1.0, expo});
    const double x[2] = {0.4, 1.3};
    const double f = std::pow(2.0, -1.0 / expo);
    CHECK(e2.eval(x).D == doctest::Approx(e1.eval(x).D * f).epsilon(1e-12));
    CHECK(e2.eval(x).norm_gradD(2) ==
          doctest::Approx(e1.eval(x).norm_gradD(2) * f).epsilon(1e-12));
  }
}

TEST_CASE("flat annihilation: F vanishes and |gradD| constant on planes") {
  // d = 2 plane in R^3 exercises the multi-dimensional grid path.
  const PointMeasure m = gen_flat_plane(3, 2, 0.5, 6.0, 0.1);
  const SpatialIndex index(m);
  FieldEvaluator eval(m, index, KernelParams{3, 2.0, 1.0});
  const FlatConstants fc = flat_constants(2, 1.0);
  const double expect = fc.c2 * std::pow(0.5, -1.0);

  Rng rng(61);
  std::vector<double> grads;
  for (int i = 0; i < 30; ++i) {
    const double x[3] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                         rng.uniform(0.6, 1.5)};
    const FieldEval e = eval.eval(x);
    REQUIRE(e.resolved);
    CHECK(e.F <= 1e-8);
    grads.push_back(e.norm_gradD(3));
    CHECK(e.norm_gradD(3) == doctest::Approx(expect).epsilon(5e-3));
  }
  const auto [lo, hi] = std::minmax_element(grads.begin(), grads.end());
  CHECK((*hi - *lo) / *lo < 1e-6);
}

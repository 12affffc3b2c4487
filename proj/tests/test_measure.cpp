#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rdlab/field.hpp"
#include "rdlab/point_measure.hpp"
#include "rdlab/spatial_index.hpp"

using namespace rdlab;

namespace {

// Linear-scan oracle for nearest-neighbor queries.
std::pair<double, std::size_t> nn_scan(const PointMeasure& m, std::span<const double> x) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < m.count(); ++i) {
    const double d = dist2(m.point(i), x);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return {std::sqrt(best), arg};
}

// Direct-count oracle for ball masses.
double mass_scan(const PointMeasure& m, std::span<const double> x, double r) {
  double mass = 0.0;
  for (std::size_t i = 0; i < m.count(); ++i)
    if (dist2(m.point(i), x) <= r * r) mass += m.weights[i];
  return mass;
}

}  // namespace

TEST_CASE("flat plane generator: counts, weights, mass") {
  const PointMeasure m = gen_flat_plane(2, 1, 1.0, 100.0, 0.05);
  CHECK(m.count() == 4001);
  CHECK(m.weights[0] == doctest::Approx(0.05).epsilon(1e-12));
  // total mass = lambda (2 extent)^d within one cell weight
  CHECK(std::abs(m.total_mass - 200.0) <= 0.05 + 1e-12);
  m.validate();

  CHECK_THROWS_AS(gen_flat_plane(2, 1, 1.0, 0.1, 0.05), std::invalid_argument);
}

TEST_CASE("flat plane regularity audit near 2^d") {
  // Interior centers, radii >= 20h: the d-volume of a 1-ball of radius r is
  // 2r, so the ratio target is 2 (direct-count oracle below).
  const PointMeasure m = gen_flat_plane(2, 1, 1.0, 20.0, 0.05);
  const SpatialIndex index(m);
  std::vector<double> radii{1.0, 2.0, 4.0};
  RegularityAudit audit = audit_regularity(m, index, 16, radii, Rng(7));
  // Direct-count cross-check on one probe.
  const auto q = m.point(audit.center_ids[0]);
  CHECK(audit.ratio(0, 0) ==
        doctest::Approx(mass_scan(m, q, 1.0) / 1.0).epsilon(1e-12));
  // Centers within extent/2 of the edge can clip the window; restrict the
  // generated window so all sampled centers are interior at these radii.
  CHECK(audit.c_low >= 2.0 * 0.95);
  CHECK(audit.c_high <= 2.0 * 1.05 + 0.2);  // boundary centers only lose mass
}

TEST_CASE("four-corner generator: first generation and mass") {
  const PointMeasure m1 = gen_four_corner_cantor(1, 1.0, 2);
  REQUIRE(m1.count() == 4);
  // Centers of the four corner squares of side 1/4.
  std::vector<std::pair<double, double>> expect{{0.125, 0.125}, {0.875, 0.125},
                                                {0.125, 0.875}, {0.875, 0.875}};
  for (const auto& [ex, ey] : expect) {
    bool found = false;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto p = m1.point(i);
      if (std::abs(p[0] - ex) < 1e-15 && std::abs(p[1] - ey) < 1e-15) found = true;
    }
    CHECK(found);
  }
  for (std::size_t i = 0; i < 4; ++i) CHECK(m1.weights[i] == doctest::Approx(0.25));

  const PointMeasure m6 = gen_four_corner_cantor(6, 1.0, 2);
  CHECK(m6.count() == 4096);
  CHECK(m6.total_mass == doctest::Approx(1.0).epsilon(1e-12));
  m6.validate();

  CHECK_THROWS_AS(gen_four_corner_cantor(14, 1.0, 2, 1u << 20), std::length_error);
}

TEST_CASE("four-corner audit: finite constants, direct-count agreement") {
  const PointMeasure m = gen_four_corner_cantor(6, 1.0, 2);
  const SpatialIndex index(m);
  const auto radii = audit_radii(m);
  REQUIRE(!radii.empty());
  RegularityAudit audit = audit_regularity(m, index, 24, radii, Rng(3));
  CHECK(audit.c_low > 0.0);
  CHECK(std::isfinite(audit.c_high));
  MESSAGE("cantor k=6 empirical Ahlfors constants: c_low=", audit.c_low,
          " c_high=", audit.c_high);
  // Direct-count oracle on a handful of probes.
  for (std::size_t ci = 0; ci < std::min<std::size_t>(3, audit.center_ids.size()); ++ci) {
    const auto q = m.point(audit.center_ids[ci]);
    for (std::size_t ri = 0; ri < radii.size(); ri += 2) {
      const double got = audit.ratio(ci, ri);
      if (std::isnan(got)) continue;
      const double want = mass_scan(m, q, radii[ri]) / std::pow(radii[ri], 1.0);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("audit handles degenerate two-point input without crashing") {
  PointMeasure m;
  m.ambient_dim = 2;
  m.hausdorff_dim = 1.0;
  m.coords = {0.0, 0.0, 10.0, 0.0};
  m.weights = {1.0, 1.0};
  m.spacing = 0.5;
  m.total_mass = 2.0;
  m.label = "two points";
  m.extent = 10.0;
  const SpatialIndex index(m);
  std::vector<double> radii{3.0, 6.0, 12.0};
  const RegularityAudit audit = audit_regularity(m, index, 2, radii, Rng(1));
  CHECK(audit.c_high / audit.c_low >= 1.9);  // the gap shows up, not a crash
}

TEST_CASE("lipschitz graph: weights, zero-amplitude reduction, arc length") {
  GraphProfile sine{"sine", 0.1, 1.0};
  const PointMeasure g = gen_lipschitz_graph(2, 1, sine, 8.0, 1.0 / 128);
  // Arc-length element at the nodes.
  for (std::size_t i = 0; i < g.count(); i += 997) {
    const double u = g.point(i)[0];
    const double want = g.spacing * std::sqrt(1.0 + std::pow(0.1 * 2 * M_PI * std::cos(2 * M_PI * u), 2));
    CHECK(g.weights[i] == doctest::Approx(want).epsilon(1e-12));
  }

  // 10x-refined quadrature oracle for the window arc length.
  const double h_fine = g.spacing / 10.0;
  double oracle = 0.0;
  for (double u = -8.0; u <= 8.0 + 1e-12; u += h_fine)
    oracle += h_fine * std::sqrt(1.0 + std::pow(sine.slope(u), 2));
  CHECK(std::abs(g.total_mass - oracle) / oracle < 0.01);

  GraphProfile flat{"sine", 0.0, 1.0};
  const PointMeasure f = gen_lipschitz_graph(2, 1, flat, 8.0, 1.0 / 128);
  const PointMeasure p = gen_flat_plane(2, 1, 1.0, 8.0, 1.0 / 128);
  REQUIRE(f.count() == p.count());
  CHECK(f.total_mass == doctest::Approx(p.total_mass).epsilon(1e-12));

  CHECK_THROWS_AS(gen_lipschitz_graph(2, 1, GraphProfile{"ziggurat", 1, 1}, 8.0, 0.01),
                  std::invalid_argument);
}

TEST_CASE("circle: exact mass, refinement consistency") {
  const PointMeasure c = gen_sphere(2, 1, 1.0, 0.01);
  CHECK(c.total_mass == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
  const PointMeasure c2 = gen_sphere(2, 1, 1.0, 0.005);
  CHECK(std::abs(c.total_mass - c2.total_mass) < 1e-6);
  CHECK_THROWS_AS(gen_sphere(4, 3, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("nearest distance: zero on support, height above axis, scan oracle") {
  const PointMeasure m = gen_flat_plane(2, 1, 1.0, 10.0, 0.05);
  const SpatialIndex index(m);

  const auto on = index.nearest(m.point(7));
  CHECK(on.dist == 0.0);

  const double kappa_h = 5.0 * m.spacing;
  for (double t : {kappa_h, 0.5, 1.0, 3.0}) {
    const double x[2] = {0.0, t};
    CHECK(std::abs(index.nearest(x).dist - t) <= m.spacing / 2);
  }

  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    double x[2] = {rng.uniform(-12, 12), rng.uniform(-3, 3)};
    const auto got = index.nearest(x);
    const auto [want, arg] = nn_scan(m, x);
    CHECK(got.dist == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("ball mass equals direct count on random queries") {
  const PointMeasure m = gen_four_corner_cantor(5, 1.0, 2);
  const SpatialIndex index(m);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    double x[2] = {rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
    const double r = rng.uniform(0.01, 0.7);
    CHECK(index.ball_mass(x, r) == doctest::Approx(mass_scan(m, x, r)).epsilon(1e-12));
  }
}

TEST_CASE("audit monotonicity: enlarging the radius never decreases mass") {
  const PointMeasure m = gen_four_corner_cantor(5, 1.0, 2);
  const SpatialIndex index(m);
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto q = m.point(rng.uniform_index(m.count()));
    double prev = 0.0;
    for (double r = 0.01; r < 1.0; r *= 1.7) {
      const double mass = index.ball_mass(q, r);
      CHECK(mass >= prev);
      prev = mass;
    }
  }
}

TEST_CASE("blowup: identity rescale and audit preservation") {
  const PointMeasure m = gen_four_corner_cantor(4, 1.0, 2);
  const double q[2] = {0.0, 0.0};
  const PointMeasure id = rescale_blowup(m, q, 1.0);
  for (std::size_t i = 0; i < m.coords.size(); ++i) CHECK(id.coords[i] == m.coords[i]);
  CHECK(id.total_mass == doctest::Approx(m.total_mass));

  // Regularity ratios transport exactly onto corresponding windows.
  const auto c = m.point(5);
  const PointMeasure b = rescale_blowup(m, c, 0.25);
  const SpatialIndex im(m), ib(b);
  const double r = 0.125;
  const double zero[2] = {0.0, 0.0};
  const double ratio_m = im.ball_mass(c, r) / r;
  const double ratio_b = ib.ball_mass(zero, r / 0.25) / (r / 0.25);
  CHECK(ratio_m == doctest::Approx(ratio_b).epsilon(1e-12));

  CHECK_THROWS_AS(rescale_blowup(m, q, -1.0), std::invalid_argument);
}

TEST_CASE("measure text format round-trip") {
  const PointMeasure m = gen_four_corner_cantor(3, 0.5, 3);
  std::stringstream ss;
  save_measure(m, ss);
  const PointMeasure r = load_measure(ss);
  REQUIRE(r.count() == m.count());
  CHECK(r.ambient_dim == m.ambient_dim);
  CHECK(r.hausdorff_dim == doctest::Approx(m.hausdorff_dim));
  CHECK(r.spacing == doctest::Approx(m.spacing));
  CHECK(r.label == m.label);
  for (std::size_t i = 0; i < m.coords.size(); ++i)
    CHECK(r.coords[i] == m.coords[i]);  // 17 digits round-trips doubles
  for (std::size_t i = 0; i < m.count(); ++i) CHECK(r.weights[i] == m.weights[i]);
}

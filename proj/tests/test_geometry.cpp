#include <cmath>

#include "doctest.h"

#include "geometry.hpp"

using namespace mamimo;

TEST_CASE("distance_to_region and clamp_to_region") {
  const Region region{3.0};
  CHECK(distance_to_region(Point2(1.0, 2.0), region) == 0.0);
  CHECK(distance_to_region(Point2(0.0, 0.0), region) == 0.0);
  CHECK(distance_to_region(Point2(3.5, 1.0), region) == doctest::Approx(0.5));
  // Outside past a corner: the shortfall is the euclidean distance to it.
  CHECK(distance_to_region(Point2(-0.1, -0.1), region) ==
        doctest::Approx(0.1414213562373095).epsilon(1e-12));

  const Point2 c = clamp_to_region(Point2(-0.1, 3.4), region);
  CHECK(c.x() == 0.0);
  CHECK(c.y() == 3.0);
  const Point2 inside = clamp_to_region(Point2(1.5, 2.5), region);
  CHECK(inside.x() == 1.5);
  CHECK(inside.y() == 2.5);
}

TEST_CASE("pair_spacing_violation sums hinge shortfalls over pairs") {
  // Two antennas 0.3 apart: shortfall 0.2. Third antenna far away adds 0.
  std::vector<Point2> pts{Point2(0.0, 0.0), Point2(0.3, 0.0), Point2(2.0, 2.0)};
  CHECK(pair_spacing_violation(pts) == doctest::Approx(0.2).epsilon(1e-12));
  // Equilateral cluster with side 0.4: three pairs, 0.1 each.
  std::vector<Point2> tri{Point2(0.0, 0.0), Point2(0.4, 0.0),
                          Point2(0.2, 0.4 * std::sqrt(3.0) / 2.0)};
  CHECK(pair_spacing_violation(tri) == doctest::Approx(0.3).epsilon(1e-12));
  // Exactly lambda/2 apart is feasible.
  std::vector<Point2> ok{Point2(0.0, 0.0), Point2(0.5, 0.0)};
  CHECK(pair_spacing_violation(ok) == 0.0);
}

TEST_CASE("fpa grid lays antennas on a half-wavelength line") {
  Rng rng(1);
  const Region region{3.0};
  const auto pts = init_array(rng, 4, region, LayoutScheme::kFpaGrid);
  REQUIRE(pts.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(pts[static_cast<size_t>(i)].x() == doctest::Approx(0.5 * i));
    CHECK(pts[static_cast<size_t>(i)].y() == 0.0);
  }
  CHECK(pair_spacing_violation(pts) == 0.0);
}

TEST_CASE("random feasible arrays satisfy both constraints") {
  Rng rng(2);
  const Region region{3.0};
  for (int t = 0; t < 20; ++t) {
    const auto pts = init_array(rng, 4, region, LayoutScheme::kRandomFeasible);
    CHECK(pair_spacing_violation(pts) == 0.0);
    for (const Point2& p : pts) CHECK(distance_to_region(p, region) == 0.0);
  }
  // Different draws actually differ.
  const auto a = init_array(rng, 2, region, LayoutScheme::kRandomFeasible);
  const auto b = init_array(rng, 2, region, LayoutScheme::kRandomFeasible);
  CHECK((a[0] - b[0]).norm() > 0.0);
}

TEST_CASE("a region too small for the antenna count fails deterministically") {
  Rng rng(3);
  // side 0.4 fits a single half-wavelength grid point, so two antennas can
  // never be packed.
  CHECK_THROWS_AS(init_array(rng, 2, Region{0.4}, LayoutScheme::kRandomFeasible),
                  Error);
  try {
    init_array(rng, 2, Region{0.4}, LayoutScheme::kRandomFeasible);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegionTooSmall);
  }
  // One antenna is fine even in a tiny region.
  CHECK_NOTHROW(init_array(rng, 1, Region{0.1}, LayoutScheme::kRandomFeasible));
}

TEST_CASE("measure_feasibility checks arrays independently") {
  AntennaLayout layout;
  layout.tx = {Point2(0.0, 0.0), Point2(0.6, 0.0)};
  // The receive antenna sits 0.1 from a transmit antenna, which is fine:
  // the arrays are in different planes.
  layout.rx = {{Point2(0.1, 0.0)}};
  const Region region{3.0};
  const auto report = measure_feasibility(layout, region, {region});
  CHECK(report.feasible);
  CHECK(report.min_distance_violation == 0.0);
  CHECK(report.region_violation == 0.0);

  layout.tx[1] = Point2(0.2, 0.0);  // now the transmit pair is too close
  const auto bad = measure_feasibility(layout, region, {region});
  CHECK_FALSE(bad.feasible);
  CHECK(bad.min_distance_violation == doctest::Approx(0.3).epsilon(1e-12));
}

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "channel.hpp"
#include "geometry.hpp"

using namespace mamimo;
using std::complex;

namespace {

// Fixed two-path, 2x2 scenario; expected entries were computed with an
// independent implementation (numpy) and frozen here.
AntennaLayout fixed_layout() {
  AntennaLayout layout;
  layout.tx = {Point2(0.0, 0.0), Point2(0.5, 0.3)};
  layout.rx = {{Point2(0.2, 0.0), Point2(0.7, 0.4)}};
  return layout;
}

PathSet fixed_paths() {
  PathSet set;
  set.per_rx.resize(1);
  Path p0;
  p0.theta_t = 1.0;
  p0.phi_t = 2.0;
  p0.theta_r = 0.9;
  p0.phi_r = 1.1;
  p0.gain = {0.8, -0.3};
  Path p1;
  p1.theta_t = 0.6;
  p1.phi_t = 0.7;
  p1.theta_r = 2.0;
  p1.phi_r = 0.4;
  p1.gain = {-0.2, 0.5};
  set.per_rx[0] = {p0, p1};
  return set;
}

std::string data_path(const char* name) {
  return std::string(MAMIMO_TEST_DATA_DIR) + "/" + name;
}

ChannelRealization golden_realization() {
  // Everything derives from one pinned seed so the golden file is exactly
  // reproducible.
  Rng rng(20240101);
  const Region region{3.0};
  const AntennaLayout layout = init_layout(
      rng, 2, {2, 2}, region, {region, region}, LayoutScheme::kRandomFeasible,
      LayoutScheme::kRandomFeasible);
  const PathSet paths = sample_paths(rng, 2, 3);
  const CeeModel cee = CeeModel::scaled_identity(2, {2, 2}, 0.01);
  return realize_channel(rng, layout, paths, cee);
}

}  // namespace

TEST_CASE("path_difference matches the frozen reference value") {
  CHECK(path_difference(Point2(0.3, 0.2), M_PI / 3.0, M_PI / 4.0) ==
        doctest::Approx(0.2837117307087384).epsilon(1e-14));
  // Pure-x antenna at broadside elevation reduces to x*cos(phi).
  CHECK(path_difference(Point2(1.0, 0.0), M_PI / 2.0, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(path_difference(Point2(0.0, 1.0), 0.0, 1.234) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("response rows are unit modulus with zero phase at the origin") {
  const auto layout = fixed_layout();
  const CMatrix f = tx_response(layout.tx, 1.1, 0.7);
  REQUIRE(f.rows() == 1);
  REQUIRE(f.cols() == 2);
  CHECK(std::abs(f(0, 0) - complex<double>(1.0, 0.0)) < 1e-15);  // origin antenna
  CHECK(std::abs(std::abs(f(0, 1)) - 1.0) < 1e-15);
}

TEST_CASE("synthesize matches the independently computed channel") {
  const auto h = synthesize(fixed_layout(), fixed_paths());
  REQUIRE(h.size() == 1);
  REQUIRE(h[0].rows() == 2);
  REQUIRE(h[0].cols() == 2);
  const complex<double> expected[2][2] = {
      {{0.3177053030784932, 0.14885124540146213},
       {-0.8611946343660861, -0.22121379847487876}},
      {{1.378445032190657, 0.19313802045567496},
       {-0.8746671575266427, 0.7828296457967976}},
  };
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(h[0](i, j) - expected[i][j]) < 1e-12);
}

TEST_CASE("average channel entry power follows the path gain budget") {
  // One LoS (var 0.9) plus two NLoS (var 0.1) paths, unit-modulus steering:
  // E|H_ij|^2 = 1.1.
  Rng rng(555);
  const Region region{3.0};
  double acc = 0.0;
  int count = 0;
  for (int t = 0; t < 2000; ++t) {
    const AntennaLayout layout = init_layout(
        rng, 2, {2}, region, {region}, LayoutScheme::kRandomFeasible,
        LayoutScheme::kRandomFeasible);
    const PathSet paths = sample_paths(rng, 1, 3);
    const auto h = synthesize(layout, paths);
    acc += h[0].squaredNorm();
    count += static_cast<int>(h[0].size());
  }
  CHECK(acc / count == doctest::Approx(1.1).epsilon(0.05));
}

TEST_CASE("sample_paths uses the documented angle and gain distributions") {
  Rng rng(777);
  const PathSet set = sample_paths(rng, 2, 3);
  REQUIRE(set.num_rx() == 2);
  for (const auto& paths : set.per_rx) {
    REQUIRE(paths.size() == 3);
    for (const Path& p : paths) {
      for (double ang : {p.theta_t, p.phi_t, p.theta_r, p.phi_r}) {
        CHECK(ang >= kAngleLo);
        CHECK(ang <= kAngleHi);
      }
    }
  }
  // LoS gains carry most of the power on average.
  double los = 0.0, nlos = 0.0;
  Rng rng2(778);
  const int draws = 4000;
  for (int t = 0; t < draws; ++t) {
    const PathSet s = sample_paths(rng2, 1, 3);
    los += std::norm(s.per_rx[0][0].gain);
    nlos += std::norm(s.per_rx[0][1].gain) + std::norm(s.per_rx[0][2].gain);
  }
  CHECK(los / draws == doctest::Approx(0.9).epsilon(0.08));
  CHECK(nlos / (2.0 * draws) == doctest::Approx(0.1).epsilon(0.08));
}

TEST_CASE("realize_channel keeps perfect = estimated + error exactly") {
  Rng rng(888);
  const Region region{3.0};
  const AntennaLayout layout = init_layout(
      rng, 2, {2, 2}, region, {region, region}, LayoutScheme::kRandomFeasible,
      LayoutScheme::kRandomFeasible);
  const PathSet paths = sample_paths(rng, 2, 3);
  const CeeModel cee = CeeModel::scaled_identity(2, {2, 2}, 0.1);
  const ChannelRealization real = realize_channel(rng, layout, paths, cee);
  REQUIRE(real.num_rx() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(frobenius_norm(real.perfect[static_cast<size_t>(k)] -
                         real.estimated[static_cast<size_t>(k)] -
                         real.error[static_cast<size_t>(k)]) < 1e-14);
    CHECK(frobenius_norm(real.error[static_cast<size_t>(k)]) > 0.0);
  }
}

TEST_CASE("error draws realize the configured NMSE") {
  // nmse = E|dH_ij|^2 relative to a unit-power channel entry; with
  // B = nmse*I, A = I the error entry variance is exactly nmse.
  Rng rng(999);
  const CeeModel cee = CeeModel::scaled_identity(2, {2}, 0.04);
  double acc = 0.0;
  const int draws = 30000;
  for (int t = 0; t < draws; ++t) {
    const CMatrix dh = sample_cee(rng, cee.sqrt_a[0], cee.sqrt_b[0]);
    acc += dh.squaredNorm() / static_cast<double>(dh.size());
  }
  CHECK(acc / draws == doctest::Approx(0.04).epsilon(0.03));
}

TEST_CASE("snapshot JSON round-trips exactly") {
  const ChannelRealization real = golden_realization();
  const std::string text = realization_to_json(real);
  const ChannelRealization back = realization_from_json(text);
  REQUIRE(back.num_rx() == real.num_rx());
  for (int k = 0; k < real.num_rx(); ++k) {
    const auto ki = static_cast<size_t>(k);
    CHECK(frobenius_norm(back.perfect[ki] - real.perfect[ki]) == 0.0);
    CHECK(frobenius_norm(back.estimated[ki] - real.estimated[ki]) == 0.0);
    CHECK(frobenius_norm(back.error[ki] - real.error[ki]) == 0.0);
  }
  CHECK(realization_to_json(back) == text);
  CHECK_THROWS_AS(realization_from_json("{\"schema\":\"bogus\"}"), Error);
}

TEST_CASE("golden snapshot stays stable") {
  std::ifstream in(data_path("channel_golden.json"), std::ios::binary);
  REQUIRE_MESSAGE(in.good(),
                  "missing tests/data/channel_golden.json; regenerate with "
                  "mamimo_tests -ns -tc='regenerate channel golden'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string golden = buf.str();

  const ChannelRealization fresh = golden_realization();
  const ChannelRealization stored = realization_from_json(golden);
  REQUIRE(stored.num_rx() == fresh.num_rx());
  for (int k = 0; k < fresh.num_rx(); ++k) {
    const auto ki = static_cast<size_t>(k);
    const double scale = 1.0 + frobenius_norm(fresh.perfect[ki]);
    CHECK(frobenius_norm(stored.perfect[ki] - fresh.perfect[ki]) < 1e-12 * scale);
    CHECK(frobenius_norm(stored.estimated[ki] - fresh.estimated[ki]) <
          1e-12 * scale);
    CHECK(frobenius_norm(stored.error[ki] - fresh.error[ki]) < 1e-12 * scale);
  }
  // Byte-stable serialization, so the golden also pins the format itself.
  CHECK(realization_to_json(fresh) == golden);
}

TEST_CASE("regenerate channel golden" * doctest::skip()) {
  std::ofstream out(data_path("channel_golden.json"), std::ios::binary);
  REQUIRE(out.good());
  out << realization_to_json(golden_realization());
}

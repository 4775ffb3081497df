#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "doctest.h"

#include "oracle.hpp"
#include "rates.hpp"

using namespace mamimo;
using std::complex;

namespace {

const BeamformerRule kMrt = [](const std::vector<CMatrix>& h, double p) {
  return mrt_beamformer(h, p);
};

ScenarioConfig single_rx_config() {
  ScenarioConfig c;
  c.receivers = 1;
  c.tx_antennas = 2;
  c.rx_antennas = {1};
  c.paths = 2;
  c.scheme = Scheme::kRma;  // only the receive antenna moves
  c.nmse = 0.0;
  return c;
}

}  // namespace

TEST_CASE("movable antenna counts per scheme") {
  ScenarioConfig c;
  c.scheme = Scheme::kDs;
  CHECK(movable_antenna_count(c) == 6);  // 2 tx + 2*2 rx
  c.scheme = Scheme::kRma;
  CHECK(movable_antenna_count(c) == 4);
  c.scheme = Scheme::kFpa;
  CHECK(movable_antenna_count(c) == 0);
}

TEST_CASE("a resolution-2 grid over one movable antenna has 4 candidates") {
  const ScenarioConfig config = single_rx_config();
  Rng rng(31);
  const PathSet paths = sample_paths(rng, 1, 2);
  const CeeModel cee = CeeModel::scaled_identity(2, {1}, 0.0);
  AntennaLayout base;
  base.tx = {Point2(0.0, 0.0), Point2(0.5, 0.0)};
  base.rx = {{Point2(0.0, 0.0)}};
  const GridSearchResult res = grid_search_positions(
      paths, cee, config, GridSpec::uniform(1, 2), kMrt, base);
  CHECK(res.candidates == 4);  // the four region corners, all feasible
  CHECK(res.sum_rate >= res.min_sum_rate);
  // The winning layout keeps the fixed transmit positions.
  CHECK(res.layout.tx[0] == base.tx[0]);
  CHECK(res.layout.tx[1] == base.tx[1]);
  // And the reported optimum is reproducible from the returned layout.
  const auto h = synthesize(res.layout, paths);
  const CMatrix w = kMrt(h, config.budget());
  CHECK(ub_rate(h, w, cee, config.noise_power).sum ==
        doctest::Approx(res.sum_rate).epsilon(1e-12));
}

TEST_CASE("grid search rejects oversized grids and wrong spec sizes") {
  const ScenarioConfig config = single_rx_config();
  Rng rng(32);
  const PathSet paths = sample_paths(rng, 1, 2);
  const CeeModel cee = CeeModel::scaled_identity(2, {1}, 0.0);
  AntennaLayout base;
  base.tx = {Point2(0.0, 0.0), Point2(0.5, 0.0)};
  base.rx = {{Point2(0.0, 0.0)}};
  CHECK_THROWS_AS(grid_search_positions(paths, cee, config,
                                        GridSpec::uniform(1, 1001), kMrt, base),
                  Error);
  CHECK_THROWS_AS(grid_search_positions(paths, cee, config,
                                        GridSpec::uniform(2, 3), kMrt, base),
                  Error);
  CHECK_THROWS_AS(grid_search_positions(paths, cee, config,
                                        GridSpec::uniform(1, 1), kMrt, base),
                  Error);
}

TEST_CASE("MRT matches the matched filter for a single-antenna receiver") {
  Rng rng(33);
  const CMatrix h = sample_cn(rng, 3, 1);
  const double p = 10.0;
  const CMatrix w = mrt_beamformer({h}, p);
  CHECK(power(w) == doctest::Approx(p).epsilon(1e-10));
  // Up to a global phase, w must equal sqrt(p) h / |h|.
  const complex<double> corr = (w.col(0).adjoint() * h.col(0))(0, 0);
  CHECK(std::abs(corr) ==
        doctest::Approx(std::sqrt(p) * h.col(0).norm()).epsilon(1e-8));
}

TEST_CASE("MRT is invariant to a global channel phase") {
  Rng rng(34);
  const CMatrix h = sample_cn(rng, 2, 2);
  const CMatrix h_rot = std::polar(1.0, 1.234) * h;
  const double p = 5.0;
  const CMatrix w1 = mrt_beamformer({h}, p);
  const CMatrix w2 = mrt_beamformer({h_rot}, p);
  const CeeModel cee = CeeModel::scaled_identity(2, {2}, 0.0);
  CHECK(ub_rate({h}, w1, cee, 1.0).sum ==
        doctest::Approx(ub_rate({h_rot}, w2, cee, 1.0).sum).epsilon(1e-9));
}

TEST_CASE("MRT agrees with a direct eigendecomposition") {
  Rng rng(35);
  const CMatrix h = sample_cn(rng, 3, 2);
  const CMatrix w = mrt_beamformer({h}, 1.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h * h.adjoint());
  const CVector top = es.eigenvectors().col(es.eigenvalues().size() - 1);
  // Compare the rank-1 projectors, which ignore the arbitrary phase.
  const CMatrix p1 = w.col(0) * w.col(0).adjoint();
  const CMatrix p2 = top * top.adjoint();
  CHECK(frobenius_norm(p1 - p2) < 1e-7);
  // Zero channel: zero beamformer, not a crash.
  const CMatrix hz = CMatrix::Zero(3, 1);
  CHECK(power(mrt_beamformer({hz}, 1.0)) == 0.0);
}

TEST_CASE("zero forcing nulls cross-user interference") {
  Rng rng(36);
  const CMatrix h1 = sample_cn(rng, 3, 1);
  const CMatrix h2 = sample_cn(rng, 3, 1);
  const double p = 8.0;
  const CMatrix w = zero_forcing_beamformer({h1, h2}, p);
  CHECK(std::abs((h1.col(0).adjoint() * w.col(1))(0, 0)) < 1e-9);
  CHECK(std::abs((h2.col(0).adjoint() * w.col(0))(0, 0)) < 1e-9);
  CHECK(w.col(0).squaredNorm() == doctest::Approx(p / 2).epsilon(1e-10));
  CHECK(w.col(1).squaredNorm() == doctest::Approx(p / 2).epsilon(1e-10));
  // With nulled interference the perfect rate splits into parallel links.
  const RateBreakdown r = perfect_rate({h1, h2}, w, 1.0);
  const double snr1 = std::norm((h1.col(0).adjoint() * w.col(0))(0, 0));
  CHECK(r.per_rx[0] == doctest::Approx(std::log2(1.0 + snr1)).epsilon(1e-9));
}

TEST_CASE("zero forcing detects rank loss") {
  Rng rng(37);
  const CMatrix h1 = sample_cn(rng, 3, 1);
  const CMatrix h2 = 2.0 * h1;  // linearly dependent
  try {
    (void)zero_forcing_beamformer({h1, h2}, 1.0);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRankDeficient);
  }
  // More receivers than transmit antennas cannot be zero-forced either.
  const CMatrix s1 = sample_cn(rng, 1, 1), s2 = sample_cn(rng, 1, 1);
  CHECK_THROWS_AS(zero_forcing_beamformer({s1, s2}, 1.0), Error);
}

TEST_CASE("grid search fails cleanly when no grid point is feasible") {
  // Two movable receive antennas on a resolution-2 grid inside a region too
  // small for half-wavelength spacing: every candidate collides.
  // Even the region diagonal (0.3 * sqrt(2)) is below half a wavelength.
  ScenarioConfig config = single_rx_config();
  config.rx_antennas = {2};
  config.region_size = 0.3;
  config.max_step = 0.03;
  Rng rng(38);
  const PathSet paths = sample_paths(rng, 1, 2);
  const CeeModel cee = CeeModel::scaled_identity(2, {2}, 0.0);
  AntennaLayout base;
  base.tx = {Point2(0.0, 0.0), Point2(0.5, 0.0)};
  base.rx = {{Point2(0.0, 0.0), Point2(0.2, 0.0)}};
  try {
    (void)grid_search_positions(paths, cee, config, GridSpec::uniform(2, 2),
                                kMrt, base);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegionTooSmall);
  }
}

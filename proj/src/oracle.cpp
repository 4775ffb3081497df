#include "oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rates.hpp"

namespace mamimo {

GridSpec GridSpec::uniform(int movable_antennas, int resolution) {
  GridSpec g;
  g.resolutions.assign(static_cast<size_t>(movable_antennas), resolution);
  return g;
}

int movable_antenna_count(const ScenarioConfig& config) {
  int count = 0;
  if (config.tx_movable()) count += config.tx_antennas;
  if (config.rx_movable()) count += config.total_rx_antennas();
  return count;
}

namespace {

// Grid coordinate for index i of a resolution-r axis over [0, side].
double grid_coord(int i, int r, double side) {
  return side * static_cast<double>(i) / static_cast<double>(r - 1);
}

// Pointer to the j-th movable antenna inside the layout, following the
// tx-then-rx ordering used by GridSpec.
std::vector<Point2*> movable_slots(AntennaLayout& layout,
                                   const ScenarioConfig& config) {
  std::vector<Point2*> slots;
  if (config.tx_movable())
    for (Point2& p : layout.tx) slots.push_back(&p);
  if (config.rx_movable())
    for (auto& arr : layout.rx)
      for (Point2& p : arr) slots.push_back(&p);
  return slots;
}

}  // namespace

GridSearchResult grid_search_positions(const PathSet& paths,
                                       const CeeModel& cee,
                                       const ScenarioConfig& config,
                                       const GridSpec& grid,
                                       const BeamformerRule& rule,
                                       const AntennaLayout& base) {
  const int movable = movable_antenna_count(config);
  if (static_cast<int>(grid.resolutions.size()) != movable)
    fail(ErrorCode::kInvalidArgument,
         "grid resolutions must match the number of movable antennas (" +
             std::to_string(movable) + ")");
  for (int r : grid.resolutions)
    if (r < 2) fail(ErrorCode::kInvalidArgument, "grid resolution must be >= 2");

  double combos = 1.0;
  for (int r : grid.resolutions) combos *= static_cast<double>(r) * r;
  if (combos > 1e6)
    fail(ErrorCode::kGridTooLarge,
         "GridTooLarge: " + std::to_string(combos) + " grid combinations exceed 1e6");

  const Region region{config.region_size};
  const std::vector<Region> rx_regions(static_cast<size_t>(config.receivers),
                                       region);

  AntennaLayout layout = base;
  std::vector<Point2*> slots = movable_slots(layout, config);

  // Odometer over (x index, y index) per movable antenna; the x index of
  // antenna 0 is the most significant digit, so candidates come out in
  // lexicographic order of the flattened coordinates and a strict `>` keeps
  // the lexicographically first maximizer.
  std::vector<int> ix(slots.size(), 0), iy(slots.size(), 0);

  GridSearchResult best;
  best.sum_rate = -1.0;
  best.min_sum_rate = std::numeric_limits<double>::infinity();

  bool done = false;
  const bool single_shot = slots.empty();
  while (true) {
    for (size_t a = 0; a < slots.size(); ++a) {
      const int r = grid.resolutions[a];
      (*slots[a])[0] = grid_coord(ix[a], r, config.region_size);
      (*slots[a])[1] = grid_coord(iy[a], r, config.region_size);
    }

    if (measure_feasibility(layout, region, rx_regions).feasible) {
      const std::vector<CMatrix> h = synthesize(layout, paths);
      const CMatrix w = rule(h, config.budget());
      const double sum = ub_rate(h, w, cee, config.noise_power).sum;
      ++best.candidates;
      if (sum > best.sum_rate) {
        best.sum_rate = sum;
        best.layout = layout;
      }
      best.min_sum_rate = std::min(best.min_sum_rate, sum);
    }

    if (single_shot) break;
    // Advance the odometer, least significant digit last.
    size_t a = slots.size();
    while (a > 0) {
      --a;
      if (++iy[a] < grid.resolutions[a]) break;
      iy[a] = 0;
      if (++ix[a] < grid.resolutions[a]) break;
      ix[a] = 0;
      if (a == 0) done = true;
    }
    if (done) break;
  }

  if (best.candidates == 0)
    fail(ErrorCode::kRegionTooSmall, "no feasible layout on the search grid");
  return best;
}

CMatrix mrt_beamformer(const std::vector<CMatrix>& h_est, double budget) {
  if (h_est.size() != 1)
    fail(ErrorCode::kInvalidArgument, "mrt_beamformer is a single-receiver rule");
  const CMatrix& h = h_est[0];
  const Eigen::Index n = h.rows();
  CMatrix w = CMatrix::Zero(n, 1);
  if (frobenius_norm(h) == 0.0) return w;

  const CMatrix hh = h * h.adjoint();
  // Power iteration; the start vector comes from a fixed derived stream so
  // the oracle is deterministic while still being generic (never orthogonal
  // to the principal eigenspace in practice).
  Rng start_rng(0x9E3779B97F4A7C15ULL);
  CVector v = sample_cn(start_rng, n, 1);
  v /= v.norm();
  for (int it = 0; it < 100000; ++it) {
    CVector next = hh * v;
    const double norm = next.norm();
    if (norm == 0.0) break;  // v landed in the null space; restart direction
    next /= norm;
    const double delta = (next - v).norm();
    v = next;
    if (delta <= 1e-10) break;
  }
  w.col(0) = std::sqrt(budget) * v;
  return w;
}

CMatrix zero_forcing_beamformer(const std::vector<CMatrix>& h_est,
                                double budget) {
  const int k = static_cast<int>(h_est.size());
  if (k < 1) fail(ErrorCode::kInvalidArgument, "zero forcing needs receivers");
  const Eigen::Index n = h_est[0].rows();
  if (k > n)
    fail(ErrorCode::kInvalidArgument,
         "zero forcing needs at least as many transmit antennas as receivers");

  // Stack the effective row channels h_k^H (each receiver has one antenna).
  CMatrix stack(k, n);
  for (int i = 0; i < k; ++i) {
    if (h_est[i].cols() != 1)
      fail(ErrorCode::kInvalidArgument,
           "zero forcing is defined for single-antenna receivers");
    if (h_est[i].rows() != n)
      fail(ErrorCode::kInvalidArgument, "receiver channels disagree on transmit size");
    stack.row(i) = h_est[i].col(0).adjoint();
  }

  const CMatrix gram = stack * stack.adjoint();  // k x k, Hermitian PSD
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
  const double max_ev = es.eigenvalues().maxCoeff();
  if (max_ev <= 0.0 || es.eigenvalues().minCoeff() < 1e-12 * max_ev)
    fail(ErrorCode::kRankDeficient, "RankDeficient: stacked channel loses rank");

  // Right pseudo-inverse stack^H (stack stack^H)^{-1}; column k zeroes the
  // interference at every other receiver.
  const CMatrix pinv = stack.adjoint() * solve_hermitian_positive(gram, CMatrix::Identity(k, k));

  CMatrix w(n, k);
  const double per_user = budget / static_cast<double>(k);
  for (int i = 0; i < k; ++i) {
    const double norm = pinv.col(i).norm();
    if (norm == 0.0) fail(ErrorCode::kRankDeficient, "RankDeficient: zero pseudo-inverse column");
    w.col(i) = std::sqrt(per_user) / norm * pinv.col(i);
  }
  return w;
}

}  // namespace mamimo

#pragma once

#include <functional>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "geometry.hpp"
#include "linalg.hpp"

namespace mamimo {

// Brute-force and closed-form references, used by the tests and by the
// validation checks to arbitrate what the learned policies produce. These
// share the rates/channel numeric core but are independent of the
// environment and the learner.

// Maps estimated channels to a beamforming matrix under a power budget.
using BeamformerRule =
    std::function<CMatrix(const std::vector<CMatrix>& h_est, double budget)>;

// Grid resolution (points per axis) for each movable antenna, in layout
// order: transmit antennas first, then each receiver's antennas. Which
// antennas count as movable follows the config scheme.
struct GridSpec {
  std::vector<int> resolutions;

  static GridSpec uniform(int movable_antennas, int resolution);
};

struct GridSearchResult {
  AntennaLayout layout;
  double sum_rate = 0.0;
  double min_sum_rate = 0.0;  // worst feasible candidate, for spread checks
  long long candidates = 0;   // feasible layouts actually evaluated
};

// Movable antenna count implied by the scheme (DS: tx and rx, RMA: rx only,
// FPA: none).
int movable_antenna_count(const ScenarioConfig& config);

// Exhaustive search over all grid placements of the movable antennas; the
// remaining antennas stay at their `base` positions. Every candidate is
// checked exactly against the spacing and region constraints, the channel is
// synthesized deterministically (the estimate is taken as the synthesized
// channel, no error draw), the rule produces W, and the robust-bound sum
// rate is the objective. Ties break toward the lexicographically first
// layout in grid order.
// Throws Error(kGridTooLarge) when the number of combinations exceeds 1e6.
GridSearchResult grid_search_positions(const PathSet& paths,
                                       const CeeModel& cee,
                                       const ScenarioConfig& config,
                                       const GridSpec& grid,
                                       const BeamformerRule& rule,
                                       const AntennaLayout& base);

// Single-user maximum ratio transmission: w = sqrt(P) times the principal
// left singular direction of H_1, via power iteration on H_1 H_1^H to 1e-10.
// A zero channel yields w = 0.
CMatrix mrt_beamformer(const std::vector<CMatrix>& h_est, double budget);

// Zero-forcing for the all-single-antenna-receiver case (each M_k = 1,
// K <= N): columns of the right pseudo-inverse of the stacked row channels,
// scaled to equal per-user power summing to `budget`. Throws
// Error(kRankDeficient) when the stack loses rank.
CMatrix zero_forcing_beamformer(const std::vector<CMatrix>& h_est,
                                double budget);

}  // namespace mamimo

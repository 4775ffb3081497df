#pragma once

#include <Eigen/Dense>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace mamimo {

using Point2 = Eigen::Vector2d;

// Square movement region [0, side]^2, coordinates in wavelength units.
struct Region {
  double side = 0.0;
};

// Positions of all antennas, wavelength units. tx has N points, rx[k] has
// M_k points for receiver k. Transmit and receive arrays live in separate
// planes, so there is no cross-array geometry.
struct AntennaLayout {
  std::vector<Point2> tx;
  std::vector<std::vector<Point2>> rx;

  int num_tx() const { return static_cast<int>(tx.size()); }
  int num_rx_arrays() const { return static_cast<int>(rx.size()); }
};

struct FeasibilityReport {
  double min_distance_violation = 0.0;  // sum of hinge shortfalls below lambda/2
  double region_violation = 0.0;        // sum of distances to the region
  bool feasible = true;
};

// Minimum spacing between antennas of one array, in wavelengths.
inline constexpr double kMinSpacing = 0.5;

// Euclidean distance from p to the region (0 when inside).
double distance_to_region(const Point2& p, const Region& region);

// Coordinate-wise clamp into [0, side]^2. Idempotent.
Point2 clamp_to_region(const Point2& p, const Region& region);

// Hinge sum of spacing shortfalls over all pairs within one array:
// sum over i<j of max(0, lambda/2 - |p_i - p_j|).
double pair_spacing_violation(const std::vector<Point2>& points);

// Sum of distance_to_region over the points of one array.
double array_region_violation(const std::vector<Point2>& points,
                              const Region& region);

// Feasibility of the whole layout against the spacing and region constraints.
// Pairs are taken within the transmit array and within each receiver's array
// only; arrays are spatially separate and place no constraint on each other.
FeasibilityReport measure_feasibility(const AntennaLayout& layout,
                                      const Region& tx_region,
                                      const std::vector<Region>& rx_regions);

enum class LayoutScheme {
  kRandomFeasible,  // rejection-sampled uniform, all constraints satisfied
  kFpaGrid,         // lambda/2-spaced line along x from the region origin
};

// Positions for one array of `count` antennas in `region`.
// kRandomFeasible redraws the whole array until it satisfies the spacing
// constraint; a lambda/2 grid-packing capacity check runs first so regions
// that cannot hold `count` antennas at grid spacing fail deterministically.
// Throws Error(kRegionTooSmall) on the capacity check or after 1e5 attempts.
std::vector<Point2> init_array(Rng& rng, int count, const Region& region,
                               LayoutScheme scheme);

// Full layout: transmit array plus one array per receiver.
AntennaLayout init_layout(Rng& rng, int num_tx, const std::vector<int>& num_rx,
                          const Region& tx_region,
                          const std::vector<Region>& rx_regions,
                          LayoutScheme tx_scheme, LayoutScheme rx_scheme);

}  // namespace mamimo

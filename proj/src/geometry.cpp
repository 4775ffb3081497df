#include "geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mamimo {

namespace {
constexpr int kMaxRejectionAttempts = 100000;
}

double distance_to_region(const Point2& p, const Region& region) {
  const double dx = std::max({0.0, -p.x(), p.x() - region.side});
  const double dy = std::max({0.0, -p.y(), p.y() - region.side});
  return std::hypot(dx, dy);
}

Point2 clamp_to_region(const Point2& p, const Region& region) {
  return {std::clamp(p.x(), 0.0, region.side),
          std::clamp(p.y(), 0.0, region.side)};
}

double pair_spacing_violation(const std::vector<Point2>& points) {
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      const double d = (points[i] - points[j]).norm();
      total += std::max(0.0, kMinSpacing - d);
    }
  return total;
}

double array_region_violation(const std::vector<Point2>& points,
                              const Region& region) {
  double total = 0.0;
  for (const auto& p : points) total += distance_to_region(p, region);
  return total;
}

FeasibilityReport measure_feasibility(const AntennaLayout& layout,
                                      const Region& tx_region,
                                      const std::vector<Region>& rx_regions) {
  if (rx_regions.size() != layout.rx.size())
    fail(ErrorCode::kInvalidArgument, "measure_feasibility: region count mismatch");
  FeasibilityReport report;
  report.min_distance_violation = pair_spacing_violation(layout.tx);
  report.region_violation = array_region_violation(layout.tx, tx_region);
  for (size_t k = 0; k < layout.rx.size(); ++k) {
    report.min_distance_violation += pair_spacing_violation(layout.rx[k]);
    report.region_violation += array_region_violation(layout.rx[k], rx_regions[k]);
  }
  report.feasible = report.min_distance_violation == 0.0 &&
                    report.region_violation == 0.0;
  return report;
}

std::vector<Point2> init_array(Rng& rng, int count, const Region& region,
                               LayoutScheme scheme) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "init_array: count < 1");
  if (region.side <= 0.0)
    fail(ErrorCode::kInvalidArgument, "init_array: region side <= 0");

  if (scheme == LayoutScheme::kFpaGrid) {
    if (static_cast<double>(count - 1) * kMinSpacing > region.side)
      fail(ErrorCode::kRegionTooSmall, "RegionTooSmall");
    std::vector<Point2> points(count);
    for (int i = 0; i < count; ++i) points[i] = {i * kMinSpacing, 0.0};
    return points;
  }

  // Capacity bound: the lambda/2 grid is the arrangement we can always
  // construct, so a region whose grid holds fewer than `count` antennas is
  // rejected up front instead of spinning through hopeless draws.
  const int per_axis = static_cast<int>(std::floor(region.side / kMinSpacing)) + 1;
  if (static_cast<long long>(per_axis) * per_axis < count)
    fail(ErrorCode::kRegionTooSmall, "RegionTooSmall");

  std::vector<Point2> points(count);
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    for (auto& p : points)
      p = {rng.uniform(0.0, region.side), rng.uniform(0.0, region.side)};
    if (pair_spacing_violation(points) == 0.0) return points;
  }
  fail(ErrorCode::kRegionTooSmall, "RegionTooSmall");
}

AntennaLayout init_layout(Rng& rng, int num_tx, const std::vector<int>& num_rx,
                          const Region& tx_region,
                          const std::vector<Region>& rx_regions,
                          LayoutScheme tx_scheme, LayoutScheme rx_scheme) {
  if (num_rx.size() != rx_regions.size())
    fail(ErrorCode::kInvalidArgument, "init_layout: region count mismatch");
  AntennaLayout layout;
  layout.tx = init_array(rng, num_tx, tx_region, tx_scheme);
  layout.rx.reserve(num_rx.size());
  for (size_t k = 0; k < num_rx.size(); ++k)
    layout.rx.push_back(init_array(rng, num_rx[k], rx_regions[k], rx_scheme));
  return layout;
}

}  // namespace mamimo

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mamimo {

// One far-field propagation path between the transmitter and a receiver.
// Angles are elevation/azimuth in radians in [0, pi]; departure (AoD) and
// arrival (AoA) angles stay fixed while antennas move within their regions.
struct Path {
  double theta_t = 0.0;
  double phi_t = 0.0;
  double theta_r = 0.0;
  double phi_r = 0.0;
  std::complex<double> gain;
};

// Paths per receiver; index 0 is the LoS path.
struct PathSet {
  std::vector<std::vector<Path>> per_rx;

  int num_rx() const { return static_cast<int>(per_rx.size()); }
};

// Gain power used when drawing paths: LoS CN(0, 0.9), each NLoS CN(0, 0.1).
inline constexpr double kLosGainVar = 0.9;
inline constexpr double kNlosGainVar = 0.1;
// Path angles are iid uniform on [pi/3, 2pi/3].
inline constexpr double kAngleLo = M_PI / 3.0;
inline constexpr double kAngleHi = 2.0 * M_PI / 3.0;

// Channel estimation error statistics for one receiver: the error matrix is
// matrix-gaussian with receiver-side covariance A (M_k x M_k) and
// transmitter-side covariance B (N x N). In the default configuration
// A = I and B = nmse * I.
struct CeeModel {
  std::vector<CMatrix> a;  // per receiver, M_k x M_k, Hermitian PSD
  std::vector<CMatrix> b;  // per receiver, N x N, Hermitian PSD
  double nmse = 0.0;

  // Cached PSD square roots used by the sampler.
  std::vector<CMatrix> sqrt_a;
  std::vector<CMatrix> sqrt_b;

  static CeeModel scaled_identity(int num_tx, const std::vector<int>& num_rx,
                                  double nmse);
  static CeeModel from_covariances(std::vector<CMatrix> a,
                                   std::vector<CMatrix> b, double nmse);
};

// Actual channel H_k, estimate H_hat_k and their difference, per receiver.
// By construction estimated[k] = perfect[k] - error[k].
struct ChannelRealization {
  std::vector<CMatrix> perfect;
  std::vector<CMatrix> estimated;
  std::vector<CMatrix> error;

  int num_rx() const { return static_cast<int>(perfect.size()); }
};

// Propagation difference of an antenna at `pos` (wavelength units) relative
// to the region origin, for a path of elevation theta and azimuth phi:
// x sin(theta) cos(phi) + y cos(theta). Result is in wavelengths.
double path_difference(const Point2& pos, double theta, double phi);

// Array response vectors: unit-modulus phases exp(j 2 pi d / lambda), one
// entry per antenna, as a 1 x N (or 1 x M_k) row.
CMatrix tx_response(const std::vector<Point2>& tx_positions, double theta,
                    double phi);
CMatrix rx_response(const std::vector<Point2>& rx_positions, double theta,
                    double phi);

// Channel matrices H_k = sum_l g_l * a_l^H * f_l for every receiver,
// each N x M_k. Linear in the path gains.
std::vector<CMatrix> synthesize(const AntennaLayout& layout,
                                const PathSet& paths);

// Draws num_paths paths per receiver with the default angle and gain
// distributions (path 0 = LoS).
PathSet sample_paths(Rng& rng, int num_rx, int num_paths);

// One error matrix draw: dH = sqrt(B) * G * sqrt(A)^T with G iid CN(0,1),
// which realizes the matrix-gaussian law with covariances (A, B). This
// orientation makes E[dH^H w w^H dH] = tr(B w w^H) * A^T hold exactly.
CMatrix sample_cee(Rng& rng, const CMatrix& sqrt_a, const CMatrix& sqrt_b);

// Perfect channels from the layout plus a fresh CEE draw per receiver;
// estimated = perfect - error.
ChannelRealization realize_channel(Rng& rng, const AntennaLayout& layout,
                                   const PathSet& paths, const CeeModel& cee);

// JSON snapshot (entries as [re, im] pairs) for golden-file regression tests.
std::string realization_to_json(const ChannelRealization& real);
ChannelRealization realization_from_json(const std::string& text);

}  // namespace mamimo

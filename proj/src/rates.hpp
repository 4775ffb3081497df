#pragma once

#include <vector>

#include "channel.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mamimo {

// Per-receiver achievable rates (bits per channel use) plus the
// interference-plus-noise covariance each rate was computed with.
// std_err is populated by the Monte-Carlo estimator only.
struct RateBreakdown {
  std::vector<double> per_rx;
  double sum = 0.0;
  std::vector<CMatrix> noise_cov;
  std::vector<double> std_err;
};

// Total transmit power tr(W W^H).
double power(const CMatrix& w);

// Rate under perfect CSI:
//   R_k = log2(1 + w_k^H H_k J_k^{-1} H_k^H w_k),
//   J_k = sum_{k' != k} H_k^H w_k' w_k'^H H_k + noise_power * I.
RateBreakdown perfect_rate(const std::vector<CMatrix>& h, const CMatrix& w,
                           double noise_power);

// Closed-form upper bound on the expected rate under imperfect CSI:
//   R_k <= log2(1 + w_k^H Hh_k U_k^{-1} Hh_k^H w_k),
//   U_k = sum_{k'} tr(B_k w_k' w_k'^H) A_k^T
//       + sum_{k' != k} Hh_k^H w_k' w_k'^H Hh_k + noise_power * I.
// The estimation-error trace term runs over all users, mirroring the full
// self-plus-interference error term inside the exact expectation.
RateBreakdown ub_rate(const std::vector<CMatrix>& h_est, const CMatrix& w,
                      const CeeModel& cee, double noise_power);

// Monte-Carlo estimate of the expected rate under imperfect CSI: averages
//   log2(1 + w_k^H Hh_k Jh_k^{-1} Hh_k^H w_k)
// over fresh error draws, where Jh_k folds the drawn error into the
// interference covariance. Returns per-receiver sample standard errors.
RateBreakdown mc_rate(const std::vector<CMatrix>& h_est, const CMatrix& w,
                      const CeeModel& cee, double noise_power, Rng& rng,
                      int samples);

}  // namespace mamimo

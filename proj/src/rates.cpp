#include "rates.hpp"

#include <cmath>

namespace mamimo {

namespace {

// log2(1 + w^H H C^{-1} H^H w) with C Hermitian PD.
double rate_with_cov(const CMatrix& h, const CVector& w_k, const CMatrix& cov) {
  const CVector hw = h.adjoint() * w_k;  // M x 1
  const CMatrix x = solve_hermitian_positive(cov, hw);
  const std::complex<double> q = (hw.adjoint() * x)(0, 0);  // hw^H x
  return std::log2(1.0 + std::max(0.0, q.real()));
}

// sum_{k' != k} H^H w_k' w_k'^H H, an M x M Hermitian PSD matrix.
CMatrix interference_cov(const CMatrix& h, const CMatrix& w, Eigen::Index k) {
  const CMatrix hw = h.adjoint() * w;  // M x K, column k' = H^H w_k'
  CMatrix cov = hw * hw.adjoint();
  cov.noalias() -= hw.col(k) * hw.col(k).adjoint();
  return cov;
}

void finalize(RateBreakdown& r) {
  r.sum = 0.0;
  for (double v : r.per_rx) r.sum += v;
}

void check_shapes(const std::vector<CMatrix>& h, const CMatrix& w) {
  if (static_cast<Eigen::Index>(h.size()) != w.cols())
    fail(ErrorCode::kInvalidArgument,
         "rates: W needs one column per receiver");
  for (const CMatrix& hk : h)
    if (hk.rows() != w.rows())
      fail(ErrorCode::kInvalidArgument,
           "rates: channel and W disagree on the transmit antenna count");
}

}  // namespace

double power(const CMatrix& w) { return w.squaredNorm(); }

RateBreakdown perfect_rate(const std::vector<CMatrix>& h, const CMatrix& w,
                           double noise_power) {
  if (noise_power <= 0.0)
    fail(ErrorCode::kInvalidArgument, "perfect_rate: noise_power <= 0");
  check_shapes(h, w);
  RateBreakdown r;
  for (size_t k = 0; k < h.size(); ++k) {
    const Eigen::Index m = h[k].cols();
    CMatrix cov = interference_cov(h[k], w, static_cast<Eigen::Index>(k));
    cov += noise_power * CMatrix::Identity(m, m);
    r.per_rx.push_back(rate_with_cov(h[k], w.col(static_cast<Eigen::Index>(k)), cov));
    r.noise_cov.push_back(std::move(cov));
  }
  finalize(r);
  return r;
}

RateBreakdown ub_rate(const std::vector<CMatrix>& h_est, const CMatrix& w,
                      const CeeModel& cee, double noise_power) {
  if (noise_power <= 0.0)
    fail(ErrorCode::kInvalidArgument, "ub_rate: noise_power <= 0");
  check_shapes(h_est, w);
  RateBreakdown r;
  for (size_t k = 0; k < h_est.size(); ++k) {
    const Eigen::Index m = h_est[k].cols();
    // tr(B_k w_k' w_k'^H) = w_k'^H B_k w_k', summed over all users.
    double trace_term = 0.0;
    for (Eigen::Index kp = 0; kp < w.cols(); ++kp)
      trace_term += real_quadratic_form(w.col(kp), cee.b[k]);
    CMatrix cov = interference_cov(h_est[k], w, static_cast<Eigen::Index>(k));
    cov += trace_term * cee.a[k].transpose();
    cov += noise_power * CMatrix::Identity(m, m);
    r.per_rx.push_back(rate_with_cov(h_est[k], w.col(static_cast<Eigen::Index>(k)), cov));
    r.noise_cov.push_back(std::move(cov));
  }
  finalize(r);
  return r;
}

RateBreakdown mc_rate(const std::vector<CMatrix>& h_est, const CMatrix& w,
                      const CeeModel& cee, double noise_power, Rng& rng,
                      int samples) {
  if (samples < 1) fail(ErrorCode::kInvalidArgument, "mc_rate: samples < 1");
  if (noise_power <= 0.0)
    fail(ErrorCode::kInvalidArgument, "mc_rate: noise_power <= 0");
  check_shapes(h_est, w);

  const size_t num_rx = h_est.size();
  // Welford accumulators: exact zero variance for degenerate (zeta = 0) draws.
  std::vector<double> mean(num_rx, 0.0), m2(num_rx, 0.0);
  std::vector<CMatrix> base_cov;
  base_cov.reserve(num_rx);
  for (size_t k = 0; k < num_rx; ++k) {
    const Eigen::Index m = h_est[k].cols();
    CMatrix cov = interference_cov(h_est[k], w, static_cast<Eigen::Index>(k));
    cov += noise_power * CMatrix::Identity(m, m);
    base_cov.push_back(std::move(cov));
  }

  for (int s = 0; s < samples; ++s) {
    for (size_t k = 0; k < num_rx; ++k) {
      const CMatrix dh = sample_cee(rng, cee.sqrt_a[k], cee.sqrt_b[k]);
      // sum_{k'} dH^H w_k' w_k'^H dH = (W^H dH)^H (W^H dH)
      const CMatrix wdh = w.adjoint() * dh;  // K x M
      const CMatrix cov = base_cov[k] + wdh.adjoint() * wdh;
      const double rate =
          rate_with_cov(h_est[k], w.col(static_cast<Eigen::Index>(k)), cov);
      const double delta = rate - mean[k];
      mean[k] += delta / (s + 1);
      m2[k] += delta * (rate - mean[k]);
    }
  }

  RateBreakdown r;
  r.noise_cov = std::move(base_cov);
  for (size_t k = 0; k < num_rx; ++k) {
    r.per_rx.push_back(mean[k]);
    double se = 0.0;
    if (samples > 1) se = std::sqrt(m2[k] / (samples - 1) / samples);
    r.std_err.push_back(se);
  }
  finalize(r);
  return r;
}

}  // namespace mamimo

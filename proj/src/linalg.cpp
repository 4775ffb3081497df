#include "linalg.hpp"

#include <cmath>

namespace mamimo {

CMatrix hermitian(const CMatrix& m) { return m.adjoint(); }

CMatrix solve_hermitian_positive(const CMatrix& m, const CMatrix& b) {
  if (m.rows() != m.cols())
    fail(ErrorCode::kInvalidArgument, "solve_hermitian_positive: M not square");
  if (m.rows() != b.rows())
    fail(ErrorCode::kInvalidArgument, "solve_hermitian_positive: size mismatch");
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::kNotPositiveDefinite, "NotPositiveDefinite");
  return llt.solve(b);
}

CMatrix sample_cn(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.cgaussian();
  return m;
}

double real_quadratic_form(const CVector& w, const CMatrix& m) {
  const std::complex<double> q = w.adjoint() * m * w;
  return q.real();
}

CMatrix sqrt_psd(const CMatrix& m) {
  if (m.rows() != m.cols())
    fail(ErrorCode::kInvalidArgument, "sqrt_psd: M not square");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::kInvalidArgument, "sqrt_psd: eigensolver failed");
  RVector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    vals(i) = vals(i) > 0.0 ? std::sqrt(vals(i)) : 0.0;
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

double frobenius_norm(const CMatrix& m) { return m.norm(); }

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kRegionTooSmall: return "RegionTooSmall";
    case ErrorCode::kGridTooLarge: return "GridTooLarge";
    case ErrorCode::kNoEpisodes: return "NoEpisodes";
    case ErrorCode::kArchitectureMismatch: return "ArchitectureMismatch";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kCheckpointInvalid: return "CheckpointInvalid";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace mamimo

#include "channel.hpp"

#include <cmath>

#include "json.hpp"

namespace mamimo {

namespace {

CMatrix response_row(const std::vector<Point2>& positions, double theta,
                     double phi) {
  CMatrix row(1, static_cast<Eigen::Index>(positions.size()));
  for (size_t i = 0; i < positions.size(); ++i) {
    const double phase = 2.0 * M_PI * path_difference(positions[i], theta, phi);
    row(0, static_cast<Eigen::Index>(i)) = {std::cos(phase), std::sin(phase)};
  }
  return row;
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) fail(ErrorCode::kInvalidArgument, "snapshot: empty matrix");
  const auto c = static_cast<Eigen::Index>(rows.at(0).size());
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      const auto& entry = rows.at(i).at(j);
      m(i, j) = {entry.at(0).get<double>(), entry.at(1).get<double>()};
    }
  return m;
}

}  // namespace

CeeModel CeeModel::scaled_identity(int num_tx, const std::vector<int>& num_rx,
                                   double nmse) {
  std::vector<CMatrix> a, b;
  a.reserve(num_rx.size());
  b.reserve(num_rx.size());
  for (int m : num_rx) {
    a.push_back(CMatrix::Identity(m, m));
    b.push_back(nmse * CMatrix::Identity(num_tx, num_tx));
  }
  return from_covariances(std::move(a), std::move(b), nmse);
}

CeeModel CeeModel::from_covariances(std::vector<CMatrix> a,
                                    std::vector<CMatrix> b, double nmse) {
  CeeModel cee;
  cee.a = std::move(a);
  cee.b = std::move(b);
  cee.nmse = nmse;
  cee.sqrt_a.reserve(cee.a.size());
  cee.sqrt_b.reserve(cee.b.size());
  for (const auto& m : cee.a) cee.sqrt_a.push_back(sqrt_psd(m));
  for (const auto& m : cee.b) cee.sqrt_b.push_back(sqrt_psd(m));
  return cee;
}

double path_difference(const Point2& pos, double theta, double phi) {
  return pos.x() * std::sin(theta) * std::cos(phi) + pos.y() * std::cos(theta);
}

CMatrix tx_response(const std::vector<Point2>& tx_positions, double theta,
                    double phi) {
  return response_row(tx_positions, theta, phi);
}

CMatrix rx_response(const std::vector<Point2>& rx_positions, double theta,
                    double phi) {
  return response_row(rx_positions, theta, phi);
}

std::vector<CMatrix> synthesize(const AntennaLayout& layout,
                                const PathSet& paths) {
  if (paths.num_rx() != layout.num_rx_arrays())
    fail(ErrorCode::kInvalidArgument, "synthesize: receiver count mismatch");
  std::vector<CMatrix> channels;
  channels.reserve(paths.per_rx.size());
  for (size_t k = 0; k < paths.per_rx.size(); ++k) {
    CMatrix h = CMatrix::Zero(layout.num_tx(),
                              static_cast<Eigen::Index>(layout.rx[k].size()));
    for (const Path& path : paths.per_rx[k]) {
      const CMatrix a = tx_response(layout.tx, path.theta_t, path.phi_t);
      const CMatrix f = rx_response(layout.rx[k], path.theta_r, path.phi_r);
      h.noalias() += path.gain * a.adjoint() * f;
    }
    channels.push_back(std::move(h));
  }
  return channels;
}

PathSet sample_paths(Rng& rng, int num_rx, int num_paths) {
  if (num_paths < 1) fail(ErrorCode::kInvalidArgument, "sample_paths: L < 1");
  PathSet set;
  set.per_rx.resize(num_rx);
  for (int k = 0; k < num_rx; ++k) {
    set.per_rx[k].resize(num_paths);
    for (int l = 0; l < num_paths; ++l) {
      Path& p = set.per_rx[k][l];
      p.theta_t = rng.uniform(kAngleLo, kAngleHi);
      p.phi_t = rng.uniform(kAngleLo, kAngleHi);
      p.theta_r = rng.uniform(kAngleLo, kAngleHi);
      p.phi_r = rng.uniform(kAngleLo, kAngleHi);
      const double sd = std::sqrt(l == 0 ? kLosGainVar : kNlosGainVar);
      p.gain = sd * rng.cgaussian();
    }
  }
  return set;
}

CMatrix sample_cee(Rng& rng, const CMatrix& sqrt_a, const CMatrix& sqrt_b) {
  const CMatrix g = sample_cn(rng, sqrt_b.rows(), sqrt_a.rows());
  return sqrt_b * g * sqrt_a.transpose();
}

ChannelRealization realize_channel(Rng& rng, const AntennaLayout& layout,
                                   const PathSet& paths, const CeeModel& cee) {
  ChannelRealization real;
  real.perfect = synthesize(layout, paths);
  real.error.reserve(real.perfect.size());
  real.estimated.reserve(real.perfect.size());
  for (size_t k = 0; k < real.perfect.size(); ++k) {
    real.error.push_back(sample_cee(rng, cee.sqrt_a[k], cee.sqrt_b[k]));
    real.estimated.push_back(real.perfect[k] - real.error[k]);
  }
  return real;
}

std::string realization_to_json(const ChannelRealization& real) {
  nlohmann::json j;
  j["schema"] = "mamimo.channel.v1";
  j["perfect"] = nlohmann::json::array();
  j["estimated"] = nlohmann::json::array();
  j["error"] = nlohmann::json::array();
  for (int k = 0; k < real.num_rx(); ++k) {
    j["perfect"].push_back(matrix_to_json(real.perfect[k]));
    j["estimated"].push_back(matrix_to_json(real.estimated[k]));
    j["error"].push_back(matrix_to_json(real.error[k]));
  }
  return j.dump(2);
}

ChannelRealization realization_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("schema", "") != "mamimo.channel.v1")
    fail(ErrorCode::kInvalidArgument, "snapshot: unknown schema");
  ChannelRealization real;
  for (const auto& m : j.at("perfect")) real.perfect.push_back(matrix_from_json(m));
  for (const auto& m : j.at("estimated"))
    real.estimated.push_back(matrix_from_json(m));
  for (const auto& m : j.at("error")) real.error.push_back(matrix_from_json(m));
  return real;
}

}  // namespace mamimo

#include "env.hpp"

#include <algorithm>
#include <cmath>

namespace mamimo {

const char* agent_role_name(AgentRole role) {
  switch (role) {
    case AgentRole::kMaTransmitter: return "ma-tx";
    case AgentRole::kMaReceiver: return "ma-rx";
    case AgentRole::kBeamforming: return "bf";
    case AgentRole::kTrTransmitter: return "tr-tx";
    case AgentRole::kTrReceiver: return "tr-rx";
  }
  return "?";
}

std::vector<AgentDef> make_agent_defs(const ScenarioConfig& config) {
  const int n = config.tx_antennas;
  const int k = config.receivers;
  const int full_obs = 2 * n * config.total_rx_antennas();
  const int bf_act = 2 * n * k;

  std::vector<AgentDef> defs;
  if (config.algorithm == Algorithm::kTr) {
    // One transmitter agent owns both the transmit-antenna velocities and
    // the beamforming matrix, decided from the pre-movement CSI.
    defs.push_back({AgentRole::kTrTransmitter, -1, "tr-tx", full_obs, 2 * n + bf_act});
    for (int i = 0; i < k; ++i)
      defs.push_back({AgentRole::kTrReceiver, i, "tr-rx-" + std::to_string(i + 1),
                      2 * n * config.rx_antennas[i], 2 * config.rx_antennas[i]});
    return defs;
  }

  if (config.tx_movable())
    defs.push_back({AgentRole::kMaTransmitter, -1, "ma-tx", full_obs, 2 * n});
  if (config.rx_movable())
    for (int i = 0; i < k; ++i)
      defs.push_back({AgentRole::kMaReceiver, i, "ma-rx-" + std::to_string(i + 1),
                      2 * n * config.rx_antennas[i], 2 * config.rx_antennas[i]});
  defs.push_back({AgentRole::kBeamforming, -1, "bf", full_obs, bf_act});
  return defs;
}

double observation_scale(const ScenarioConfig& config) {
  const double entry_power =
      kLosGainVar + (config.paths - 1) * kNlosGainVar;
  return 1.0 / std::sqrt(entry_power);
}

Env::Env(const ScenarioConfig& config, const Rng& master)
    : config_(config),
      agents_(make_agent_defs(config)),
      paths_rng_(master.derive(RngStream::kChannelPaths)),
      cee_rng_(master.derive(RngStream::kCee)),
      layout_rng_(master.derive(RngStream::kLayout)),
      region_{config.region_size},
      rx_regions_(static_cast<size_t>(config.receivers), Region{config.region_size}),
      cee_(CeeModel::scaled_identity(config.tx_antennas, config.rx_antennas,
                                     config.nmse)),
      obs_scale_(observation_scale(config)) {}

void Env::reset() {
  ++episode_;
  slot_ = 0;
  movement_applied_ = false;
  paths_ = sample_paths(paths_rng_, config_.receivers, config_.paths);
  // Moving arrays start at a random feasible draw each episode so training
  // sees diverse initial geometries; fixed arrays sit on the half-wavelength
  // reference line.
  const LayoutScheme tx_scheme = config_.tx_movable()
                                     ? LayoutScheme::kRandomFeasible
                                     : LayoutScheme::kFpaGrid;
  const LayoutScheme rx_scheme = config_.rx_movable()
                                     ? LayoutScheme::kRandomFeasible
                                     : LayoutScheme::kFpaGrid;
  layout_ = init_layout(layout_rng_, config_.tx_antennas, config_.rx_antennas,
                        region_, rx_regions_, tx_scheme, rx_scheme);
  realization_ = realize_channel(cee_rng_, layout_, paths_, cee_);
}

RVector Env::full_csi_observation(const std::vector<CMatrix>& h_est) const {
  RVector obs(2 * config_.tx_antennas * config_.total_rx_antennas());
  Eigen::Index at = 0;
  for (const CMatrix& h : h_est)
    for (Eigen::Index r = 0; r < h.rows(); ++r)
      for (Eigen::Index c = 0; c < h.cols(); ++c) {
        obs[at++] = h(r, c).real() * obs_scale_;
        obs[at++] = h(r, c).imag() * obs_scale_;
      }
  return obs;
}

RVector Env::rx_csi_observation(const std::vector<CMatrix>& h_est, int k) const {
  const CMatrix& h = h_est[static_cast<size_t>(k)];
  RVector obs(2 * h.rows() * h.cols());
  Eigen::Index at = 0;
  for (Eigen::Index r = 0; r < h.rows(); ++r)
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      obs[at++] = h(r, c).real() * obs_scale_;
      obs[at++] = h(r, c).imag() * obs_scale_;
    }
  return obs;
}

std::vector<RVector> Env::phase_one_observations() const {
  if (episode_ < 0)
    fail(ErrorCode::kInvalidArgument, "environment used before reset()");
  std::vector<RVector> obs;
  for (const AgentDef& def : agents_) {
    if (!def.acts_before_movement()) continue;
    if (def.rx_index < 0)
      obs.push_back(full_csi_observation(realization_.estimated));
    else
      obs.push_back(rx_csi_observation(realization_.estimated, def.rx_index));
  }
  return obs;
}

namespace {

double clip_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

void Env::apply_movement(const std::vector<RVector>& phase_one_actions) {
  if (episode_ < 0)
    fail(ErrorCode::kInvalidArgument, "environment used before reset()");
  if (episode_done())
    fail(ErrorCode::kInvalidArgument, "episode is over; call reset()");

  slot_blp_.assign(agents_.size(), 0.0);
  slot_msp_.assign(agents_.size(), 0.0);
  cached_bf_raw_.resize(0);

  size_t at = 0;
  for (size_t i = 0; i < agents_.size(); ++i) {
    const AgentDef& def = agents_[i];
    if (!def.acts_before_movement()) continue;
    if (at >= phase_one_actions.size())
      fail(ErrorCode::kInvalidArgument, "missing phase-one action for " + def.name);
    const RVector& action = phase_one_actions[at++];
    if (action.size() != def.act_dim)
      fail(ErrorCode::kInvalidArgument,
           "action size mismatch for " + def.name + ": expected " +
               std::to_string(def.act_dim) + ", got " +
               std::to_string(action.size()));

    std::vector<Point2>& array =
        def.rx_index < 0 ? layout_.tx : layout_.rx[static_cast<size_t>(def.rx_index)];
    const Region& region =
        def.rx_index < 0 ? region_ : rx_regions_[static_cast<size_t>(def.rx_index)];

    for (size_t a = 0; a < array.size(); ++a) {
      const Point2 target =
          array[a] + config_.max_step * Point2(clip_unit(action[2 * a]),
                                               clip_unit(action[2 * a + 1]));
      slot_msp_[i] += distance_to_region(target, region);
      array[a] = clamp_to_region(target, region);
    }
    slot_blp_[i] = pair_spacing_violation(array);

    if (def.role == AgentRole::kTrTransmitter)
      cached_bf_raw_ = action.tail(action.size() - 2 * config_.tx_antennas);
  }
  if (at != phase_one_actions.size())
    fail(ErrorCode::kInvalidArgument, "too many phase-one actions");

  reconfigure();
  movement_applied_ = true;
}

void Env::reconfigure() {
  realization_ = realize_channel(cee_rng_, layout_, paths_, cee_);
}

RVector Env::beamformer_observation() const {
  if (!movement_applied_)
    fail(ErrorCode::kInvalidArgument,
         "beamformer observes the reconfigured CSI; apply_movement first");
  return full_csi_observation(realization_.estimated);
}

CMatrix Env::build_beamformer(const RVector& raw) const {
  const int n = config_.tx_antennas;
  const int k = config_.receivers;
  if (raw.size() != 2 * n * k)
    fail(ErrorCode::kInvalidArgument,
         "beamforming action must hold " + std::to_string(2 * n * k) +
             " values, got " + std::to_string(raw.size()));
  const double scale = std::sqrt(config_.budget() / static_cast<double>(k));
  CMatrix w(n, k);
  // Column-major real block first, then the matching imaginary block.
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < n; ++r) {
      const int idx = c * n + r;
      w(r, c) = scale * std::complex<double>(clip_unit(raw[idx]),
                                             clip_unit(raw[n * k + idx]));
    }
  return w;
}

SlotOutcome Env::score_slot(const CMatrix& w_in) {
  CMatrix w = w_in;
  const double budget = config_.budget();
  if (project_power_) {
    const double used = power(w);
    if (used > budget) w *= std::sqrt(budget / used);
  }

  SlotOutcome out;
  out.episode = episode_;
  out.slot = slot_;
  out.w = w;
  out.power_used = power(w);
  out.power_penalty = std::max(0.0, out.power_used - budget) / budget;
  const RateBreakdown rates =
      ub_rate(realization_.estimated, w, cee_, config_.noise_power);
  out.sum_rate = rates.sum;
  out.per_rx_rate = rates.per_rx;
  out.blp = slot_blp_;
  out.msp = slot_msp_;

  out.rewards.resize(agents_.size());
  for (size_t i = 0; i < agents_.size(); ++i) {
    double r = rates.sum;
    if (agents_[i].moves_antennas())
      r -= config_.penalty_blp * slot_blp_[i] + config_.penalty_msp * slot_msp_[i];
    if (agents_[i].outputs_beamformer())
      r -= config_.penalty_pp * out.power_penalty;
    out.rewards[i] = r;
  }

  ++slot_;
  movement_applied_ = false;
  return out;
}

SlotOutcome Env::complete_slot(const RVector& bf_raw) {
  if (!movement_applied_)
    fail(ErrorCode::kInvalidArgument, "apply_movement must run before complete_slot");
  if (config_.algorithm == Algorithm::kTr)
    fail(ErrorCode::kInvalidArgument,
         "the transmitter-centric variant derives W from the transmitter action");
  return score_slot(build_beamformer(bf_raw));
}

SlotOutcome Env::complete_slot() {
  if (!movement_applied_)
    fail(ErrorCode::kInvalidArgument, "apply_movement must run before complete_slot");
  if (config_.algorithm != Algorithm::kTr)
    fail(ErrorCode::kInvalidArgument, "a beamforming action is required");
  return score_slot(build_beamformer(cached_bf_raw_));
}

SlotOutcome Env::step(const std::vector<RVector>& phase_one_actions,
                      const RVector& bf_raw) {
  apply_movement(phase_one_actions);
  if (config_.algorithm == Algorithm::kTr) return complete_slot();
  return complete_slot(bf_raw);
}

}  // namespace mamimo

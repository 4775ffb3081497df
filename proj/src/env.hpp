#pragma once

#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "geometry.hpp"
#include "linalg.hpp"
#include "rates.hpp"
#include "rng.hpp"

namespace mamimo {

enum class AgentRole {
  kMaTransmitter,  // moves the N transmit antennas
  kMaReceiver,     // moves receiver rx_index's M_k antennas
  kBeamforming,    // outputs W from the reconfigured CSI
  kTrTransmitter,  // transmitter-centric variant: moves tx antennas AND outputs W
  kTrReceiver,     // transmitter-centric variant receiver mover
};

const char* agent_role_name(AgentRole role);

struct AgentDef {
  AgentRole role;
  int rx_index = -1;  // receiver roles only
  std::string name;
  int obs_dim = 0;
  int act_dim = 0;

  bool acts_before_movement() const { return role != AgentRole::kBeamforming; }
  bool moves_antennas() const { return role != AgentRole::kBeamforming; }
  bool outputs_beamformer() const {
    return role == AgentRole::kBeamforming || role == AgentRole::kTrTransmitter;
  }
};

// The agent roster implied by scheme and algorithm:
//   DS  + heterogeneous: [ma-tx, ma-rx 1..K, beamforming]   (K+2 agents)
//   RMA + heterogeneous: [ma-rx 1..K, beamforming]
//   FPA + heterogeneous: [beamforming]
//   DS  + TR:            [tr-tx, tr-rx 1..K]
std::vector<AgentDef> make_agent_defs(const ScenarioConfig& config);

// Fixed input scale 1 / sqrt(E[|H|^2]) from the path gain model, applied to
// every CSI observation entry so network inputs are O(1).
double observation_scale(const ScenarioConfig& config);

// Everything one slot produced, for rewards, logging and traces.
struct SlotOutcome {
  std::vector<double> rewards;     // per agent, roster order
  std::vector<double> blp;         // spacing penalty per agent (0 for non-movers)
  std::vector<double> msp;         // region penalty per agent
  double power_penalty = 0.0;      // max(0, tr(WW^H) - P) / P
  double power_used = 0.0;         // tr(WW^H) after optional projection
  double sum_rate = 0.0;           // robust-bound sum rate on the slot's CSI
  std::vector<double> per_rx_rate;
  CMatrix w;
  int episode = 0;
  int slot = 0;
};

// Two-stage per-slot environment. One slot runs:
//   1. phase_one_observations(): every moving agent sees the current
//      estimated CSI (transmitter roles the full stack, receiver roles
//      their own matrix);
//   2. apply_movement(actions): velocities scale by max_step, positions
//      clamp into the region, the region shortfall before clamping and the
//      spacing shortfall after clamping are charged to the owning agent,
//      and the channel is re-estimated at the new layout with a fresh
//      error draw;
//   3. the beamforming agent (if any) sees the reconfigured CSI via
//      beamformer_observation();
//   4. complete_slot(...) forms W, scores every agent against the
//      reconfigured CSI, and advances the slot counter.
// The per-episode path set is frozen at reset() and only reset() redraws it.
class Env {
 public:
  Env(const ScenarioConfig& config, const Rng& master);

  // Starts a new episode: fresh paths, fresh layout, initial CSI estimate.
  void reset();

  const ScenarioConfig& config() const { return config_; }
  const std::vector<AgentDef>& agents() const { return agents_; }
  int slot() const { return slot_; }
  int episode() const { return episode_; }
  bool episode_done() const { return slot_ >= config_.episode_slots; }
  const AntennaLayout& layout() const { return layout_; }
  const PathSet& paths() const { return paths_; }
  const ChannelRealization& realization() const { return realization_; }

  // When enabled, W is scaled onto the power sphere whenever it exceeds the
  // budget, so reported rates are always feasible. Off during training (the
  // power constraint is learned through the penalty), on for evaluation.
  void set_power_projection(bool on) { project_power_ = on; }

  // Observations for every agent with acts_before_movement(), roster order.
  std::vector<RVector> phase_one_observations() const;

  // Applies the phase-one actions (one vector per phase-one agent, roster
  // order) and reconfigures the CSI. Velocity components are defensively
  // clamped to [-1, 1].
  void apply_movement(const std::vector<RVector>& phase_one_actions);

  // Reconfigured CSI for the beamforming agent; only meaningful after
  // apply_movement in a slot with a beamforming agent.
  RVector beamformer_observation() const;

  // Heterogeneous variants: W comes from the beamforming agent's raw action
  // (2NK values in [-1, 1]: Re{W} column-major, then Im{W}, each scaled by
  // sqrt(P/K)).
  SlotOutcome complete_slot(const RVector& bf_raw);
  // Transmitter-centric variant: W was cached from the transmitter's
  // phase-one action.
  SlotOutcome complete_slot();

  // Convenience wrapper for tests: runs one full slot from fixed actions.
  SlotOutcome step(const std::vector<RVector>& phase_one_actions,
                   const RVector& bf_raw);

  // Flattened CSI observation helpers (Re/Im interleaved, receivers in
  // order, each matrix row-major, scaled by observation_scale()).
  RVector full_csi_observation(const std::vector<CMatrix>& h_est) const;
  RVector rx_csi_observation(const std::vector<CMatrix>& h_est, int k) const;

 private:
  void reconfigure();
  CMatrix build_beamformer(const RVector& raw) const;
  SlotOutcome score_slot(const CMatrix& w);

  ScenarioConfig config_;
  std::vector<AgentDef> agents_;
  Rng paths_rng_;
  Rng cee_rng_;
  Rng layout_rng_;
  Region region_;
  std::vector<Region> rx_regions_;
  CeeModel cee_;
  double obs_scale_ = 1.0;
  bool project_power_ = false;

  PathSet paths_;
  AntennaLayout layout_;
  ChannelRealization realization_;
  int slot_ = 0;
  int episode_ = -1;

  // Per-agent penalties of the slot in flight, filled by apply_movement.
  std::vector<double> slot_blp_;
  std::vector<double> slot_msp_;
  RVector cached_bf_raw_;
  bool movement_applied_ = false;
};

}  // namespace mamimo

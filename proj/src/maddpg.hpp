#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "env.hpp"
#include "neural.hpp"

namespace mamimo {

// One slot's experience, shared by every agent's buffer: each agent stores
// what it saw/did plus everybody else's observation and action, which the
// centralized critics consume.
struct SlotRecord {
  std::vector<RVector> obs;       // per agent, its own observation this slot
  std::vector<RVector> act;       // per agent
  std::vector<double> reward;     // per agent
  std::vector<RVector> next_obs;  // per agent, its observation next slot
  double done = 0.0;              // 1 on the episode's final slot
};

using RecordPtr = std::shared_ptr<const SlotRecord>;
using Batch = std::vector<RecordPtr>;

// Bounded FIFO with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);
  void push(RecordPtr record);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  Batch sample(Rng& rng, int batch) const;

 private:
  std::deque<RecordPtr> items_;
  int capacity_;
};

// Where each agent's observation and action land inside the centralized
// critic input: [obs_1 .. obs_A, act_1 .. act_A].
struct JointLayout {
  std::vector<int> obs_offset;
  std::vector<int> act_offset;
  int total_obs = 0;
  int total_act = 0;

  int critic_input() const { return total_obs + total_act; }

  static JointLayout from_defs(const std::vector<AgentDef>& defs);
};

struct Agent {
  AgentDef def;
  Mlp actor, critic;
  Mlp target_actor, target_critic;
  AdamState actor_opt, critic_opt;
  ReplayBuffer buffer;

  Agent(const AgentDef& d, int critic_input, const ScenarioConfig& config,
        Rng& init_rng);
};

// One CSV-bound row per slot. Losses are absent until the buffers reach the
// batch size.
struct TrainingLogRow {
  int episode = 0;
  int slot = 0;
  long long global_slot = 0;
  double sum_rate = 0.0;
  double power_used = 0.0;
  double power_penalty = 0.0;
  double noise_scale = 0.0;
  std::vector<double> reward;
  std::vector<double> blp;
  std::vector<double> msp;
  std::vector<std::optional<double>> critic_loss;
  std::vector<std::optional<double>> actor_objective;
};

struct EvalSummary {
  int episodes = 0;
  double mean_sum_rate = 0.0;
  double std_sum_rate = 0.0;           // over per-episode tail means
  std::vector<double> per_rx_rate;     // mean over counted slots
  double mean_power = 0.0;
  double feasible_fraction = 0.0;      // counted slots with zero spacing violation
  std::vector<double> episode_sum_rate;
};

// Multi-agent DDPG with centralized critics and decentralized actors,
// covering the heterogeneous roster (movement agents plus a beamforming
// agent), the receiver-only and fixed-antenna reductions, and the
// transmitter-centric variant.
class Trainer {
 public:
  Trainer(const ScenarioConfig& config, uint64_t seed);

  const ScenarioConfig& config() const { return config_; }
  uint64_t seed() const { return seed_; }
  const std::vector<Agent>& agents() const { return agents_; }
  std::vector<Agent>& agents() { return agents_; }
  const JointLayout& joint_layout() const { return layout_; }
  Env& env() { return env_; }
  double noise_scale() const { return noise_scale_; }
  long long global_slot() const { return global_slot_; }

  // Actor forward plus iid Gaussian exploration noise, clipped to [-1, 1].
  RVector noisy_action(int agent_index, const RVector& obs, double noise_scale,
                       Rng& rng) const;

  // One Adam step on the mean squared TD error against the target networks'
  // bootstrap; returns the pre-step loss.
  double critic_update(int agent_index, const Batch& batch);

  // One Adam ascent step on the mean critic value with this agent's action
  // replaced by its actor's output; returns the pre-step objective. Only the
  // actor moves; critic and targets are read-only here.
  double actor_update(int agent_index, const Batch& batch);

  // Full training run: episodes x slots, storing experience, updating every
  // agent once per slot once its buffer holds a batch, and soft-updating the
  // target networks. Deterministic for a fixed (config, seed).
  void train(const std::function<void(const TrainingLogRow&)>& on_slot = {});

  // Noise-free rollouts with power projection on, scored over the final 20%
  // of each episode's slots. The config may differ from the training config
  // in physics (e.g. estimation error), but must keep every agent's
  // observation/action dimensions. Throws Error(kNoEpisodes) when episodes
  // is not positive.
  EvalSummary evaluate(const ScenarioConfig& eval_config, int episodes,
                       uint64_t eval_seed,
                       const std::function<void(const SlotOutcome&,
                                                const AntennaLayout&)>& on_slot = {}) const;
  EvalSummary evaluate(int episodes, uint64_t eval_seed) const;

  // Index of the beamforming agent in the roster, -1 for the
  // transmitter-centric variant.
  int beamformer_index() const { return bf_index_; }

  // Checkpoints: JSON header + '\0' + raw little-endian float64 payload;
  // save -> load -> save reproduces the file byte for byte.
  void save_checkpoint(const std::string& path);
  static Trainer load_checkpoint(const std::string& path);

 private:
  void store_record(const RecordPtr& record);
  RMatrix joint_input(const Batch& batch) const;
  RMatrix gather_obs(const Batch& batch, int agent_index, bool next) const;

  ScenarioConfig config_;
  uint64_t seed_ = 0;
  std::vector<AgentDef> defs_;
  JointLayout layout_;
  Env env_;
  std::vector<Agent> agents_;
  std::vector<int> phase1_indices_;
  int bf_index_ = -1;
  Rng explore_rng_;
  Rng replay_rng_;
  double noise_scale_ = 0.0;
  long long global_slot_ = 0;
};

}  // namespace mamimo

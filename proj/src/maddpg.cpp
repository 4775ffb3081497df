#include "maddpg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mamimo {

using nlohmann::json;

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) fail(ErrorCode::kInvalidArgument, "replay capacity must be >= 1");
}

void ReplayBuffer::push(RecordPtr record) {
  items_.push_back(std::move(record));
  if (static_cast<int>(items_.size()) > capacity_) items_.pop_front();
}

Batch ReplayBuffer::sample(Rng& rng, int batch) const {
  if (batch < 1 || items_.empty() || static_cast<int>(items_.size()) < batch)
    fail(ErrorCode::kInvalidArgument, "replay buffer smaller than the batch");
  Batch out;
  out.reserve(static_cast<size_t>(batch));
  for (int i = 0; i < batch; ++i) {
    const size_t idx = std::min(
        items_.size() - 1,
        static_cast<size_t>(rng.uniform() * static_cast<double>(items_.size())));
    out.push_back(items_[idx]);
  }
  return out;
}

JointLayout JointLayout::from_defs(const std::vector<AgentDef>& defs) {
  JointLayout layout;
  for (const AgentDef& def : defs) {
    layout.obs_offset.push_back(layout.total_obs);
    layout.total_obs += def.obs_dim;
  }
  for (const AgentDef& def : defs) {
    layout.act_offset.push_back(layout.total_act);
    layout.total_act += def.act_dim;
  }
  // Action blocks live after every observation block.
  for (int& off : layout.act_offset) off += layout.total_obs;
  return layout;
}

namespace {

// Weight of the mean squared-logit penalty in the actor objective.
constexpr double kActorLogitPenalty = 1e-3;

std::vector<int> net_sizes(int in, int out, const ScenarioConfig& config) {
  std::vector<int> sizes{in};
  for (int l = 0; l < config.hidden_layers; ++l) sizes.push_back(config.hidden_units);
  sizes.push_back(out);
  return sizes;
}

}  // namespace

Agent::Agent(const AgentDef& d, int critic_input, const ScenarioConfig& config,
             Rng& init_rng)
    : def(d),
      actor(Mlp::create(net_sizes(d.obs_dim, d.act_dim, config), Head::kTanh,
                        init_rng)),
      critic(Mlp::create(net_sizes(critic_input, 1, config), Head::kIdentity,
                         init_rng)),
      target_actor(actor),
      target_critic(critic),
      actor_opt(AdamState::create(actor, config.learning_rate)),
      critic_opt(AdamState::create(critic, config.learning_rate)),
      buffer(config.replay_capacity) {}

Trainer::Trainer(const ScenarioConfig& config, uint64_t seed)
    : config_(config),
      seed_(seed),
      defs_(make_agent_defs(config)),
      layout_(JointLayout::from_defs(defs_)),
      env_(config, Rng(seed)),
      explore_rng_(Rng(seed).derive(RngStream::kExploration)),
      replay_rng_(Rng(seed).derive(RngStream::kReplay)),
      noise_scale_(config.noise_start) {
  Rng init_rng = Rng(seed).derive(RngStream::kNetworkInit);
  agents_.reserve(defs_.size());
  for (const AgentDef& def : defs_)
    agents_.emplace_back(def, layout_.critic_input(), config_, init_rng);
  for (size_t i = 0; i < defs_.size(); ++i) {
    if (defs_[i].acts_before_movement()) phase1_indices_.push_back(static_cast<int>(i));
    if (defs_[i].role == AgentRole::kBeamforming) bf_index_ = static_cast<int>(i);
  }
}

RVector Trainer::noisy_action(int agent_index, const RVector& obs,
                              double noise_scale, Rng& rng) const {
  const Agent& ag = agents_[static_cast<size_t>(agent_index)];
  RVector a = forward(ag.actor, obs);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a[i] = std::clamp(a[i] + noise_scale * rng.gaussian(), -1.0, 1.0);
  return a;
}

RMatrix Trainer::gather_obs(const Batch& batch, int agent_index, bool next) const {
  const int dim = defs_[static_cast<size_t>(agent_index)].obs_dim;
  RMatrix out(dim, static_cast<Eigen::Index>(batch.size()));
  for (size_t c = 0; c < batch.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) =
        next ? batch[c]->next_obs[static_cast<size_t>(agent_index)]
             : batch[c]->obs[static_cast<size_t>(agent_index)];
  return out;
}

RMatrix Trainer::joint_input(const Batch& batch) const {
  RMatrix x(layout_.critic_input(), static_cast<Eigen::Index>(batch.size()));
  for (size_t c = 0; c < batch.size(); ++c) {
    const SlotRecord& rec = *batch[c];
    const auto col = static_cast<Eigen::Index>(c);
    for (size_t j = 0; j < defs_.size(); ++j) {
      x.block(layout_.obs_offset[j], col, defs_[j].obs_dim, 1) = rec.obs[j];
      x.block(layout_.act_offset[j], col, defs_[j].act_dim, 1) = rec.act[j];
    }
  }
  return x;
}

double Trainer::critic_update(int agent_index, const Batch& batch) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "empty batch");
  Agent& ag = agents_[static_cast<size_t>(agent_index)];
  const auto b = static_cast<Eigen::Index>(batch.size());

  // Joint next-state input: next observations plus target-actor actions.
  RMatrix xn(layout_.critic_input(), b);
  RVector r(b), not_done(b);
  for (Eigen::Index c = 0; c < b; ++c) {
    const SlotRecord& rec = *batch[static_cast<size_t>(c)];
    for (size_t j = 0; j < defs_.size(); ++j)
      xn.block(layout_.obs_offset[j], c, defs_[j].obs_dim, 1) = rec.next_obs[j];
    r[c] = rec.reward[static_cast<size_t>(agent_index)];
    not_done[c] = 1.0 - rec.done;
  }
  for (size_t j = 0; j < defs_.size(); ++j) {
    const RMatrix next_act =
        forward(agents_[j].target_actor, gather_obs(batch, static_cast<int>(j), true));
    xn.block(layout_.act_offset[j], 0, defs_[j].act_dim, b) = next_act;
  }

  const RMatrix qn = forward(ag.target_critic, xn);  // 1 x b
  const RVector y =
      r + config_.discount * not_done.cwiseProduct(qn.row(0).transpose());

  ForwardCache cache;
  const RMatrix q = forward(ag.critic, joint_input(batch), &cache);
  const RVector diff = q.row(0).transpose() - y;
  const double loss = diff.squaredNorm() / static_cast<double>(b);

  const RMatrix upstream = (2.0 / static_cast<double>(b)) * diff.transpose();
  Gradients grads = backward(ag.critic, cache, upstream);
  adam_step(ag.critic_opt, ag.critic, grads);
  return loss;
}

double Trainer::actor_update(int agent_index, const Batch& batch) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "empty batch");
  Agent& ag = agents_[static_cast<size_t>(agent_index)];
  const auto b = static_cast<Eigen::Index>(batch.size());

  ForwardCache actor_cache;
  const RMatrix own_act =
      forward(ag.actor, gather_obs(batch, agent_index, false), &actor_cache);

  RMatrix x = joint_input(batch);
  x.block(layout_.act_offset[static_cast<size_t>(agent_index)], 0,
          defs_[static_cast<size_t>(agent_index)].act_dim, b) = own_act;

  ForwardCache critic_cache;
  const RMatrix q = forward(ag.critic, x, &critic_cache);
  const double objective = q.row(0).mean();

  // d(mean Q)/dQ = 1/b per sample; ascend by feeding the critic's input
  // gradient at this agent's action slot back through the actor and
  // flipping the sign for the minimizing optimizer.
  const RMatrix upstream = RMatrix::Constant(1, b, 1.0 / static_cast<double>(b));
  const Gradients critic_grads = backward(ag.critic, critic_cache, upstream);
  const RMatrix d_action = critic_grads.input.middleRows(
      layout_.act_offset[static_cast<size_t>(agent_index)],
      defs_[static_cast<size_t>(agent_index)].act_dim);

  Gradients actor_grads = backward(ag.actor, actor_cache, d_action);
  for (auto& gw : actor_grads.w) gw = -gw;
  for (auto& gb : actor_grads.b) gb = -gb;

  // Small squared penalty on the pre-squash logits. Its gradient reaches the
  // weights without passing through tanh', so a saturated actor still feels
  // a restoring pull back toward the interior of the action space instead of
  // freezing in a corner where the policy gradient vanishes.
  const RMatrix& logits = actor_cache.pre.back();
  const double reg_scale = 2.0 * kActorLogitPenalty /
                           (static_cast<double>(b) * static_cast<double>(logits.rows()));
  const Gradients reg_grads =
      backward(ag.actor, actor_cache, reg_scale * logits, true);
  for (size_t l = 0; l < actor_grads.w.size(); ++l) {
    actor_grads.w[l] += reg_grads.w[l];
    actor_grads.b[l] += reg_grads.b[l];
  }

  adam_step(ag.actor_opt, ag.actor, actor_grads);
  return objective;
}

void Trainer::store_record(const RecordPtr& record) {
  for (Agent& ag : agents_) ag.buffer.push(record);
}

void Trainer::train(const std::function<void(const TrainingLogRow&)>& on_slot) {
  const size_t num_agents = defs_.size();
  for (int episode = 0; episode < config_.episodes; ++episode) {
    env_.reset();
    std::shared_ptr<SlotRecord> pending;
    for (int slot = 0; slot < config_.episode_slots; ++slot) {
      const double slot_noise = noise_scale_;

      const std::vector<RVector> obs1 = env_.phase_one_observations();
      std::vector<RVector> acts1;
      acts1.reserve(obs1.size());
      for (size_t p = 0; p < phase1_indices_.size(); ++p)
        acts1.push_back(
            noisy_action(phase1_indices_[p], obs1[p], slot_noise, explore_rng_));
      env_.apply_movement(acts1);

      // The previous slot's record was waiting for the beamformer's next
      // observation, which is this slot's reconfigured CSI.
      if (pending) {
        pending->next_obs[static_cast<size_t>(bf_index_)] =
            env_.beamformer_observation();
        store_record(pending);
        pending.reset();
      }

      auto rec = std::make_shared<SlotRecord>();
      rec->obs.resize(num_agents);
      rec->act.resize(num_agents);
      rec->next_obs.resize(num_agents);
      for (size_t p = 0; p < phase1_indices_.size(); ++p) {
        rec->obs[static_cast<size_t>(phase1_indices_[p])] = obs1[p];
        rec->act[static_cast<size_t>(phase1_indices_[p])] = acts1[p];
      }

      SlotOutcome outcome;
      if (bf_index_ >= 0) {
        const RVector bf_obs = env_.beamformer_observation();
        const RVector bf_act =
            noisy_action(bf_index_, bf_obs, slot_noise, explore_rng_);
        rec->obs[static_cast<size_t>(bf_index_)] = bf_obs;
        rec->act[static_cast<size_t>(bf_index_)] = bf_act;
        outcome = env_.complete_slot(bf_act);
      } else {
        outcome = env_.complete_slot();
      }
      rec->reward = outcome.rewards;

      // Movement agents observe the reconfigured CSI at the next slot's
      // start, which is already known.
      const std::vector<RVector> next1 = env_.phase_one_observations();
      for (size_t p = 0; p < phase1_indices_.size(); ++p)
        rec->next_obs[static_cast<size_t>(phase1_indices_[p])] = next1[p];

      if (env_.episode_done()) {
        rec->done = 1.0;
        if (bf_index_ >= 0)
          rec->next_obs[static_cast<size_t>(bf_index_)] =
              RVector::Zero(defs_[static_cast<size_t>(bf_index_)].obs_dim);
        store_record(rec);
      } else if (bf_index_ >= 0) {
        pending = rec;
      } else {
        store_record(rec);
      }

      TrainingLogRow row;
      row.episode = episode;
      row.slot = slot;
      row.global_slot = global_slot_;
      row.sum_rate = outcome.sum_rate;
      row.power_used = outcome.power_used;
      row.power_penalty = outcome.power_penalty;
      row.noise_scale = slot_noise;
      row.reward = outcome.rewards;
      row.blp = outcome.blp;
      row.msp = outcome.msp;
      row.critic_loss.resize(num_agents);
      row.actor_objective.resize(num_agents);

      for (size_t i = 0; i < num_agents; ++i) {
        Agent& ag = agents_[i];
        if (ag.buffer.size() < config_.batch_size) continue;
        const Batch batch = ag.buffer.sample(replay_rng_, config_.batch_size);
        row.critic_loss[i] = critic_update(static_cast<int>(i), batch);
        row.actor_objective[i] = actor_update(static_cast<int>(i), batch);
        soft_update(ag.target_critic, ag.critic, config_.tau);
        soft_update(ag.target_actor, ag.actor, config_.tau);
      }

      ++global_slot_;
      noise_scale_ = std::max(config_.noise_floor, noise_scale_ * config_.noise_decay);
      if (on_slot) on_slot(row);
    }
  }
}

EvalSummary Trainer::evaluate(int episodes, uint64_t eval_seed) const {
  return evaluate(config_, episodes, eval_seed, {});
}

EvalSummary Trainer::evaluate(
    const ScenarioConfig& eval_config, int episodes, uint64_t eval_seed,
    const std::function<void(const SlotOutcome&, const AntennaLayout&)>& on_slot)
    const {
  if (episodes < 1) fail(ErrorCode::kNoEpisodes, "NoEpisodes: episodes must be >= 1");
  const std::vector<AgentDef> eval_defs = make_agent_defs(eval_config);
  if (eval_defs.size() != defs_.size())
    fail(ErrorCode::kArchitectureMismatch,
         "evaluation config changes the agent roster");
  for (size_t i = 0; i < defs_.size(); ++i)
    if (eval_defs[i].role != defs_[i].role ||
        eval_defs[i].obs_dim != defs_[i].obs_dim ||
        eval_defs[i].act_dim != defs_[i].act_dim)
      fail(ErrorCode::kArchitectureMismatch,
           "evaluation config changes observation/action sizes for " +
               defs_[i].name);

  Env env(eval_config, Rng(eval_seed).derive(RngStream::kEvaluation));
  env.set_power_projection(true);
  const int slots = eval_config.episode_slots;
  const int tail_start = slots - std::max(1, slots / 5);

  EvalSummary summary;
  summary.episodes = episodes;
  summary.per_rx_rate.assign(static_cast<size_t>(eval_config.receivers), 0.0);
  long long counted = 0;
  long long feasible = 0;
  double power_total = 0.0;

  for (int e = 0; e < episodes; ++e) {
    env.reset();
    double tail_sum = 0.0;
    int tail_count = 0;
    for (int t = 0; t < slots; ++t) {
      const std::vector<RVector> obs1 = env.phase_one_observations();
      std::vector<RVector> acts1;
      acts1.reserve(obs1.size());
      for (size_t p = 0; p < phase1_indices_.size(); ++p)
        acts1.push_back(
            forward(agents_[static_cast<size_t>(phase1_indices_[p])].actor, obs1[p]));
      env.apply_movement(acts1);

      SlotOutcome outcome;
      if (bf_index_ >= 0) {
        const RVector bf_act = forward(
            agents_[static_cast<size_t>(bf_index_)].actor, env.beamformer_observation());
        outcome = env.complete_slot(bf_act);
      } else {
        outcome = env.complete_slot();
      }
      if (on_slot) on_slot(outcome, env.layout());

      if (t >= tail_start) {
        tail_sum += outcome.sum_rate;
        ++tail_count;
        ++counted;
        power_total += outcome.power_used;
        for (size_t k = 0; k < outcome.per_rx_rate.size(); ++k)
          summary.per_rx_rate[k] += outcome.per_rx_rate[k];
        double spacing = 0.0;
        for (double v : outcome.blp) spacing += v;
        if (spacing == 0.0) ++feasible;
      }
    }
    summary.episode_sum_rate.push_back(tail_sum / std::max(1, tail_count));
  }

  double mean = 0.0;
  for (double v : summary.episode_sum_rate) mean += v;
  mean /= static_cast<double>(episodes);
  double var = 0.0;
  for (double v : summary.episode_sum_rate) var += (v - mean) * (v - mean);
  summary.mean_sum_rate = mean;
  summary.std_sum_rate =
      episodes > 1 ? std::sqrt(var / static_cast<double>(episodes - 1)) : 0.0;
  for (double& v : summary.per_rx_rate) v /= static_cast<double>(counted);
  summary.mean_power = power_total / static_cast<double>(counted);
  summary.feasible_fraction =
      static_cast<double>(feasible) / static_cast<double>(counted);
  return summary;
}

namespace {

// Every float64 tensor of the trainer in a fixed order: network parameters,
// then optimizer moments, per agent.
struct TensorItem {
  std::string name;
  RMatrix* mat = nullptr;
  RVector* vec = nullptr;

  Eigen::Index rows() const { return mat ? mat->rows() : vec->size(); }
  Eigen::Index cols() const { return mat ? mat->cols() : 1; }
  double* data() const { return mat ? mat->data() : vec->data(); }
  Eigen::Index count() const { return rows() * cols(); }
};

void collect_net(const std::string& prefix, Mlp& net, std::vector<TensorItem>& out) {
  for (int l = 0; l < net.layers(); ++l) {
    out.push_back({prefix + "/w" + std::to_string(l), &net.w[static_cast<size_t>(l)], nullptr});
    out.push_back({prefix + "/b" + std::to_string(l), nullptr, &net.b[static_cast<size_t>(l)]});
  }
}

void collect_adam(const std::string& prefix, AdamState& opt, std::vector<TensorItem>& out) {
  for (size_t l = 0; l < opt.mw.size(); ++l) {
    const std::string suffix = std::to_string(l);
    out.push_back({prefix + "/mw" + suffix, &opt.mw[l], nullptr});
    out.push_back({prefix + "/vw" + suffix, &opt.vw[l], nullptr});
    out.push_back({prefix + "/mb" + suffix, nullptr, &opt.mb[l]});
    out.push_back({prefix + "/vb" + suffix, nullptr, &opt.vb[l]});
  }
}

std::vector<TensorItem> tensor_registry(std::vector<Agent>& agents) {
  std::vector<TensorItem> items;
  for (size_t i = 0; i < agents.size(); ++i) {
    const std::string prefix = "agent" + std::to_string(i);
    collect_net(prefix + "/actor", agents[i].actor, items);
    collect_net(prefix + "/critic", agents[i].critic, items);
    collect_net(prefix + "/actor_target", agents[i].target_actor, items);
    collect_net(prefix + "/critic_target", agents[i].target_critic, items);
    collect_adam(prefix + "/actor_adam", agents[i].actor_opt, items);
    collect_adam(prefix + "/critic_adam", agents[i].critic_opt, items);
  }
  return items;
}

}  // namespace

void Trainer::save_checkpoint(const std::string& path) {
  json header;
  header["format"] = "mamimo.checkpoint.v1";
  header["config"] = json::parse(config_to_json(config_));
  header["seed"] = std::to_string(seed_);
  header["noise_scale"] = noise_scale_;
  header["global_slot"] = global_slot_;

  json agents_meta = json::array();
  for (Agent& ag : agents_) {
    json a;
    a["name"] = ag.def.name;
    a["role"] = agent_role_name(ag.def.role);
    a["rx_index"] = ag.def.rx_index;
    a["obs_dim"] = ag.def.obs_dim;
    a["act_dim"] = ag.def.act_dim;
    a["actor_sizes"] = ag.actor.sizes;
    a["critic_sizes"] = ag.critic.sizes;
    a["actor_head"] = head_name(ag.actor.head);
    a["critic_head"] = head_name(ag.critic.head);
    a["actor_adam_step"] = ag.actor_opt.step;
    a["critic_adam_step"] = ag.critic_opt.step;
    agents_meta.push_back(a);
  }
  header["agents"] = agents_meta;

  std::vector<TensorItem> items = tensor_registry(agents_);
  json arrays = json::array();
  long long offset = 0;
  for (const TensorItem& item : items) {
    json t;
    t["name"] = item.name;
    t["rows"] = item.rows();
    t["cols"] = item.cols();
    t["offset"] = offset;
    arrays.push_back(t);
    offset += item.count();
  }
  header["arrays"] = arrays;
  header["payload_doubles"] = offset;

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write checkpoint: " + path);
  const std::string head = header.dump();
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.put('\0');
  for (const TensorItem& item : items)
    out.write(reinterpret_cast<const char*>(item.data()),
              static_cast<std::streamsize>(item.count() * 8));
  if (!out) fail(ErrorCode::kIo, "failed writing checkpoint: " + path);
}

Trainer Trainer::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string blob = buf.str();

  const size_t sep = blob.find('\0');
  if (sep == std::string::npos)
    fail(ErrorCode::kCheckpointInvalid, "missing header separator");
  json header;
  try {
    header = json::parse(blob.substr(0, sep));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kCheckpointInvalid, std::string("bad header: ") + e.what());
  }
  if (header.value("format", "") != "mamimo.checkpoint.v1")
    fail(ErrorCode::kCheckpointInvalid, "unknown checkpoint format");

  ScenarioConfig config;
  uint64_t seed = 0;
  try {
    config = config_from_json(header.at("config").dump());
    seed = std::stoull(header.at("seed").get<std::string>());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::kCheckpointInvalid, std::string("bad header fields: ") + e.what());
  }

  Trainer trainer(config, seed);
  trainer.noise_scale_ = header.value("noise_scale", config.noise_start);
  trainer.global_slot_ = header.value("global_slot", 0LL);

  const json& agents_meta = header.at("agents");
  if (agents_meta.size() != trainer.agents_.size())
    fail(ErrorCode::kCheckpointInvalid, "agent roster mismatch");
  for (size_t i = 0; i < trainer.agents_.size(); ++i) {
    Agent& ag = trainer.agents_[i];
    const json& a = agents_meta[i];
    if (a.value("name", "") != ag.def.name ||
        a.value("obs_dim", -1) != ag.def.obs_dim ||
        a.value("act_dim", -1) != ag.def.act_dim ||
        a.at("actor_sizes").get<std::vector<int>>() != ag.actor.sizes ||
        a.at("critic_sizes").get<std::vector<int>>() != ag.critic.sizes)
      fail(ErrorCode::kArchitectureMismatch,
           "checkpoint does not match the architecture for " + ag.def.name);
    ag.actor.head = head_from_name(a.value("actor_head", "tanh"));
    ag.critic.head = head_from_name(a.value("critic_head", "identity"));
    ag.actor_opt.step = a.value("actor_adam_step", 0LL);
    ag.critic_opt.step = a.value("critic_adam_step", 0LL);
  }

  std::vector<TensorItem> items = tensor_registry(trainer.agents_);
  const json& arrays = header.at("arrays");
  if (arrays.size() != items.size())
    fail(ErrorCode::kCheckpointInvalid, "tensor list mismatch");

  const char* payload = blob.data() + sep + 1;
  const long long payload_doubles =
      static_cast<long long>((blob.size() - sep - 1) / 8);
  if (header.value("payload_doubles", -1LL) != payload_doubles)
    fail(ErrorCode::kCheckpointInvalid, "payload size mismatch");

  for (size_t i = 0; i < items.size(); ++i) {
    const json& meta = arrays[i];
    if (meta.value("name", "") != items[i].name ||
        meta.value("rows", -1LL) != items[i].rows() ||
        meta.value("cols", -1LL) != items[i].cols())
      fail(ErrorCode::kCheckpointInvalid,
           "tensor metadata mismatch at " + items[i].name);
    const long long offset = meta.value("offset", -1LL);
    if (offset < 0 || offset + items[i].count() > payload_doubles)
      fail(ErrorCode::kCheckpointInvalid, "tensor offset out of range");
    std::memcpy(items[i].data(), payload + offset * 8,
                static_cast<size_t>(items[i].count()) * 8);
  }
  return trainer;
}

}  // namespace mamimo

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"

namespace mamimo {

enum class Scheme { kDs, kRma, kFpa };
enum class Algorithm { kHeterogeneous, kTr };

const char* scheme_name(Scheme s);
const char* algorithm_name(Algorithm a);
Scheme scheme_from_name(const std::string& name);

// Every physical and learning hyperparameter of one experiment. Loaded from
// strict JSON (unknown keys are errors); see README for the schema.
struct ScenarioConfig {
  // Scenario
  int receivers = 2;                 // K
  int tx_antennas = 2;               // N
  std::vector<int> rx_antennas = {2, 2};  // M_k per receiver
  int paths = 3;                     // L_k, path 0 = LoS
  double region_size = 3.0;          // A, in wavelengths, for every region
  double snr_db = 30.0;
  double noise_power = 1.0;          // sigma^2
  double nmse = 0.01;                // zeta^2
  double max_step = 0.3;             // per-slot displacement cap, wavelengths
  Scheme scheme = Scheme::kDs;
  Algorithm algorithm = Algorithm::kHeterogeneous;

  // Rewards
  double penalty_blp = 1.0;  // c1, spacing violations
  double penalty_msp = 1.0;  // c2, region violations
  double penalty_pp = 1.0;   // c3, power violation

  // Learning
  int episodes = 300;        // N_epi
  int episode_slots = 100;   // N_step
  int hidden_layers = 2;
  int hidden_units = 64;
  double learning_rate = 0.01;
  double discount = 0.95;
  double tau = 0.005;
  int batch_size = 64;
  int replay_capacity = 100000;
  double noise_start = 0.2;
  double noise_decay = 0.999;
  double noise_floor = 0.01;

  // Monte-Carlo sample counts used by the validation checks.
  int mc_samples = 10000;
  int mc_samples_fast = 100;

  // Power budget from SNR = P / sigma^2.
  double budget() const { return std::pow(10.0, snr_db / 10.0) * noise_power; }

  int total_rx_antennas() const;
  bool tx_movable() const;
  bool rx_movable() const;
};

// Parse + validate. Unknown keys and out-of-range values raise
// Error(kConfigInvalid) with a field-level message. Missing keys take the
// defaults above. "rx_antennas" accepts an integer (replicated across
// receivers) or an array of length `receivers`.
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig config_from_file(const std::string& path);
std::string config_to_json(const ScenarioConfig& config);

void validate(const ScenarioConfig& config);

}  // namespace mamimo

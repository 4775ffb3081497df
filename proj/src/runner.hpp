#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "maddpg.hpp"

namespace mamimo {

struct TrainResult {
  std::string manifest_path;
  std::string csv_path;
  std::string checkpoint_path;
  double duration_seconds = 0.0;
};

// Full training run: writes <out_dir>/manifest.json (before training),
// <out_dir>/train.csv (one row per slot, schema comment in row 1) and
// <out_dir>/checkpoint.bin. CSV and checkpoint bytes depend only on
// (config, seed).
TrainResult cmd_train(const ScenarioConfig& config, uint64_t seed,
                      const std::string& out_dir);

// Loads a checkpoint, optionally merges config overrides (partial JSON
// object; unknown keys are errors; agent shapes must survive), evaluates,
// and returns the summary as a JSON string. When trace_path is non-empty a
// JSON-lines file with one record per evaluated slot is written.
std::string cmd_eval(const std::string& checkpoint_path,
                     const std::string& overrides_json, int episodes,
                     uint64_t seed, const std::string& trace_path);

struct SweepSpec {
  std::string axis;  // region | snr | nmse | slots
  std::vector<double> values;
  std::vector<std::string> schemes;  // DS | RMA | FPA | TR
  std::vector<uint64_t> seeds;
  int jobs = 1;
};

// Trains and evaluates one cell per (value, scheme, seed), in parallel up to
// `jobs`, and writes a long-format CSV (axis,value,scheme,seed,sum_rate,std)
// in deterministic cell order. Returns the CSV path.
std::string cmd_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                      const std::string& out_csv);

// Applies one sweep-axis value to a config (the slots axis converts a total
// slot budget into an episode count).
ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis,
                          double value);

// Applies a scheme label, mapping the transmitter-centric ablation ("TR")
// onto scheme DS with the TR algorithm.
ScenarioConfig apply_scheme(const ScenarioConfig& base, const std::string& scheme);

// Evaluation episodes used by sweeps and the validation suite.
inline constexpr int kEvalEpisodes = 10;

// Shortest round-trip decimal formatting used by every CSV writer.
std::string format_double(double v);

}  // namespace mamimo

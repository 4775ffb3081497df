#include "runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "version.hpp"

namespace mamimo {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

namespace {

std::string utc_now() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF on any platform
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  return out;
}

std::string csv_header(const std::vector<AgentDef>& defs) {
  std::string h = "episode,slot,global_slot,sum_rate,power,power_penalty,noise_scale";
  for (const AgentDef& d : defs) h += ",reward_" + d.name;
  for (const AgentDef& d : defs)
    if (d.moves_antennas()) h += ",blp_" + d.name + ",msp_" + d.name;
  for (const AgentDef& d : defs)
    h += ",critic_loss_" + d.name + ",actor_obj_" + d.name;
  return h;
}

void write_csv_row(std::ofstream& out, const std::vector<AgentDef>& defs,
                   const TrainingLogRow& row) {
  out << row.episode << ',' << row.slot << ',' << row.global_slot << ','
      << format_double(row.sum_rate) << ',' << format_double(row.power_used)
      << ',' << format_double(row.power_penalty) << ','
      << format_double(row.noise_scale);
  for (size_t i = 0; i < defs.size(); ++i)
    out << ',' << format_double(row.reward[i]);
  for (size_t i = 0; i < defs.size(); ++i)
    if (defs[i].moves_antennas())
      out << ',' << format_double(row.blp[i]) << ',' << format_double(row.msp[i]);
  for (size_t i = 0; i < defs.size(); ++i) {
    out << ',';
    if (row.critic_loss[i]) out << format_double(*row.critic_loss[i]);
    out << ',';
    if (row.actor_objective[i]) out << format_double(*row.actor_objective[i]);
  }
  out << '\n';
}

json layout_to_json(const AntennaLayout& layout) {
  json tx = json::array();
  for (const Point2& p : layout.tx) tx.push_back({p[0], p[1]});
  json rx = json::array();
  for (const auto& arr : layout.rx) {
    json a = json::array();
    for (const Point2& p : arr) a.push_back({p[0], p[1]});
    rx.push_back(a);
  }
  return json{{"tx", tx}, {"rx", rx}};
}

}  // namespace

TrainResult cmd_train(const ScenarioConfig& config, uint64_t seed,
                      const std::string& out_dir) {
  validate(config);
  fs::create_directories(out_dir);

  TrainResult result;
  result.manifest_path = (fs::path(out_dir) / "manifest.json").string();
  result.csv_path = (fs::path(out_dir) / "train.csv").string();
  result.checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();

  json manifest;
  manifest["format"] = "mamimo.manifest.v1";
  manifest["command"] = "train";
  manifest["build"] = kBuildId;
  manifest["config"] = json::parse(config_to_json(config));
  manifest["seed"] = std::to_string(seed);
  manifest["started_utc"] = utc_now();
  manifest["outputs"] = {{"train_csv", "train.csv"}, {"checkpoint", "checkpoint.bin"}};
  {
    std::ofstream mout = open_out(result.manifest_path);
    mout << manifest.dump(2) << '\n';
  }

  Trainer trainer(config, seed);
  const auto t0 = std::chrono::steady_clock::now();
  {
    std::vector<AgentDef> defs;
    for (const Agent& a : trainer.agents()) defs.push_back(a.def);
    std::ofstream csv = open_out(result.csv_path);
    csv << "# schema: mamimo.train.v1\n" << csv_header(defs) << '\n';
    trainer.train([&](const TrainingLogRow& row) { write_csv_row(csv, defs, row); });
  }
  trainer.save_checkpoint(result.checkpoint_path);
  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::string cmd_eval(const std::string& checkpoint_path,
                     const std::string& overrides_json, int episodes,
                     uint64_t seed, const std::string& trace_path) {
  Trainer trainer = Trainer::load_checkpoint(checkpoint_path);

  ScenarioConfig eval_config = trainer.config();
  if (!overrides_json.empty()) {
    json merged = json::parse(config_to_json(trainer.config()));
    json overrides;
    try {
      overrides = json::parse(overrides_json);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kConfigInvalid,
           std::string("overrides are not valid JSON: ") + e.what());
    }
    if (!overrides.is_object())
      fail(ErrorCode::kConfigInvalid, "overrides must be a JSON object");
    for (const auto& item : overrides.items()) merged[item.key()] = item.value();
    eval_config = config_from_json(merged.dump());
  }

  std::ofstream trace;
  std::function<void(const SlotOutcome&, const AntennaLayout&)> on_slot;
  if (!trace_path.empty()) {
    trace = open_out(trace_path);
    on_slot = [&trace](const SlotOutcome& out, const AntennaLayout& layout) {
      json rec;
      rec["episode"] = out.episode;
      rec["slot"] = out.slot;
      rec["sum_rate"] = out.sum_rate;
      rec["per_rx_rate"] = out.per_rx_rate;
      rec["power"] = out.power_used;
      rec["power_penalty"] = out.power_penalty;
      rec["rewards"] = out.rewards;
      rec["blp"] = out.blp;
      rec["msp"] = out.msp;
      rec["layout"] = layout_to_json(layout);
      trace << rec.dump() << '\n';
    };
  }

  const EvalSummary summary = trainer.evaluate(eval_config, episodes, seed, on_slot);

  json j;
  j["format"] = "mamimo.eval.v1";
  j["checkpoint"] = checkpoint_path;
  j["episodes"] = summary.episodes;
  j["seed"] = std::to_string(seed);
  j["mean_sum_rate"] = summary.mean_sum_rate;
  j["std_sum_rate"] = summary.std_sum_rate;
  j["per_rx_rate"] = summary.per_rx_rate;
  j["mean_power"] = summary.mean_power;
  j["feasible_fraction"] = summary.feasible_fraction;
  j["episode_sum_rate"] = summary.episode_sum_rate;
  j["config"] = json::parse(config_to_json(eval_config));
  return j.dump(2) + "\n";
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis,
                          double value) {
  ScenarioConfig c = base;
  if (axis == "region") {
    c.region_size = value;
    c.max_step = value / 10.0;  // keep the default cap proportional
  } else if (axis == "snr") {
    c.snr_db = value;
  } else if (axis == "nmse") {
    c.nmse = value;
  } else if (axis == "slots") {
    // A total training-slot budget; whole episodes only.
    c.episodes = std::max(1, static_cast<int>(std::llround(
                                 value / static_cast<double>(c.episode_slots))));
  } else {
    fail(ErrorCode::kInvalidArgument,
         "axis: expected region, snr, nmse or slots, got \"" + axis + "\"");
  }
  validate(c);
  return c;
}

ScenarioConfig apply_scheme(const ScenarioConfig& base, const std::string& scheme) {
  ScenarioConfig c = base;
  if (scheme == "TR") {
    c.scheme = Scheme::kDs;
    c.algorithm = Algorithm::kTr;
  } else {
    c.scheme = scheme_from_name(scheme);
    c.algorithm = Algorithm::kHeterogeneous;
  }
  validate(c);
  return c;
}

std::string cmd_sweep(const ScenarioConfig& base, const SweepSpec& spec,
                      const std::string& out_csv) {
  if (spec.values.empty())
    fail(ErrorCode::kInvalidArgument, "sweep needs at least one value");
  if (spec.schemes.empty())
    fail(ErrorCode::kInvalidArgument, "sweep needs at least one scheme");
  std::vector<uint64_t> seeds = spec.seeds;
  if (seeds.empty()) seeds.push_back(1);

  struct Cell {
    double value;
    std::string scheme;
    uint64_t seed;
    double sum_rate = 0.0;
    double stddev = 0.0;
  };
  std::vector<Cell> cells;
  for (double v : spec.values)
    for (const std::string& s : spec.schemes)
      for (uint64_t seed : seeds) cells.push_back({v, s, seed, 0.0, 0.0});

  // Validate every cell's config up front so errors surface before hours of
  // training.
  for (const Cell& cell : cells)
    apply_scheme(apply_axis(base, spec.axis, cell.value), cell.scheme);

  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        Cell& cell = cells[i];
        const ScenarioConfig config =
            apply_scheme(apply_axis(base, spec.axis, cell.value), cell.scheme);
        Trainer trainer(config, cell.seed);
        trainer.train();
        const EvalSummary summary = trainer.evaluate(kEvalEpisodes, cell.seed);
        cell.sum_rate = summary.mean_sum_rate;
        cell.stddev = summary.std_sum_rate;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  if (const fs::path parent = fs::path(out_csv).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream out = open_out(out_csv);
  out << "# schema: mamimo.sweep.v1\n";
  out << "axis,value,scheme,seed,sum_rate,std\n";
  for (const Cell& cell : cells)
    out << spec.axis << ',' << format_double(cell.value) << ',' << cell.scheme
        << ',' << cell.seed << ',' << format_double(cell.sum_rate) << ','
        << format_double(cell.stddev) << '\n';
  return out_csv;
}

}  // namespace mamimo

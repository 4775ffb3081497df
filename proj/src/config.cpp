#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mamimo {

using nlohmann::json;

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kDs: return "DS";
    case Scheme::kRma: return "RMA";
    case Scheme::kFpa: return "FPA";
  }
  return "?";
}

const char* algorithm_name(Algorithm a) {
  return a == Algorithm::kTr ? "TR" : "heterogeneous";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "DS") return Scheme::kDs;
  if (name == "RMA") return Scheme::kRma;
  if (name == "FPA") return Scheme::kFpa;
  fail(ErrorCode::kConfigInvalid, "scheme: expected DS, RMA or FPA, got \"" + name + "\"");
}

int ScenarioConfig::total_rx_antennas() const {
  int total = 0;
  for (int m : rx_antennas) total += m;
  return total;
}

bool ScenarioConfig::tx_movable() const { return scheme == Scheme::kDs; }

bool ScenarioConfig::rx_movable() const { return scheme != Scheme::kFpa; }

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& message) {
  fail(ErrorCode::kConfigInvalid, field + ": " + message);
}

double get_number(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) bad_field(key, "expected a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) bad_field(key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) bad_field(key, "expected a string");
  return v.get<std::string>();
}

const std::set<std::string> kKnownKeys = {
    "receivers",      "tx_antennas",   "rx_antennas",   "paths",
    "region_size",    "snr_db",        "noise_power",   "nmse",
    "max_step",       "scheme",        "algorithm",     "penalty_blp",
    "penalty_msp",    "penalty_pp",    "episodes",      "episode_slots",
    "hidden_layers",  "hidden_units",  "learning_rate", "discount",
    "tau",            "batch_size",    "replay_capacity",
    "noise_start",    "noise_decay",   "noise_floor",   "mc_samples",
    "mc_samples_fast"};

}  // namespace

ScenarioConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kConfigInvalid, "config root must be a JSON object");

  for (const auto& item : j.items()) {
    if (!kKnownKeys.count(item.key())) bad_field(item.key(), "unknown key");
  }

  ScenarioConfig c;
  c.receivers = get_int(j, "receivers", c.receivers);
  c.tx_antennas = get_int(j, "tx_antennas", c.tx_antennas);
  c.paths = get_int(j, "paths", c.paths);
  c.region_size = get_number(j, "region_size", c.region_size);
  c.snr_db = get_number(j, "snr_db", c.snr_db);
  c.noise_power = get_number(j, "noise_power", c.noise_power);
  c.nmse = get_number(j, "nmse", c.nmse);
  // The movement cap defaults to a tenth of the region side, so it tracks
  // region_size unless pinned explicitly.
  c.max_step = j.contains("max_step") ? get_number(j, "max_step", 0.0)
                                      : c.region_size / 10.0;
  c.scheme = scheme_from_name(get_string(j, "scheme", "DS"));
  const std::string algo = get_string(j, "algorithm", "heterogeneous");
  if (algo == "heterogeneous") {
    c.algorithm = Algorithm::kHeterogeneous;
  } else if (algo == "TR") {
    c.algorithm = Algorithm::kTr;
  } else {
    bad_field("algorithm", "expected heterogeneous or TR, got \"" + algo + "\"");
  }
  c.penalty_blp = get_number(j, "penalty_blp", c.penalty_blp);
  c.penalty_msp = get_number(j, "penalty_msp", c.penalty_msp);
  c.penalty_pp = get_number(j, "penalty_pp", c.penalty_pp);
  c.episodes = get_int(j, "episodes", c.episodes);
  c.episode_slots = get_int(j, "episode_slots", c.episode_slots);
  c.hidden_layers = get_int(j, "hidden_layers", c.hidden_layers);
  c.hidden_units = get_int(j, "hidden_units", c.hidden_units);
  c.learning_rate = get_number(j, "learning_rate", c.learning_rate);
  c.discount = get_number(j, "discount", c.discount);
  c.tau = get_number(j, "tau", c.tau);
  c.batch_size = get_int(j, "batch_size", c.batch_size);
  c.replay_capacity = get_int(j, "replay_capacity", c.replay_capacity);
  c.noise_start = get_number(j, "noise_start", c.noise_start);
  c.noise_decay = get_number(j, "noise_decay", c.noise_decay);
  c.noise_floor = get_number(j, "noise_floor", c.noise_floor);
  c.mc_samples = get_int(j, "mc_samples", c.mc_samples);
  c.mc_samples_fast = get_int(j, "mc_samples_fast", c.mc_samples_fast);

  if (c.receivers < 1) bad_field("receivers", "must be >= 1");
  if (j.contains("rx_antennas")) {
    const json& v = j.at("rx_antennas");
    if (v.is_number_integer()) {
      c.rx_antennas.assign(static_cast<size_t>(c.receivers), v.get<int>());
    } else if (v.is_array()) {
      if (static_cast<int>(v.size()) != c.receivers)
        bad_field("rx_antennas", "array length must equal receivers");
      c.rx_antennas.clear();
      for (const json& e : v) {
        if (!e.is_number_integer()) bad_field("rx_antennas", "entries must be integers");
        c.rx_antennas.push_back(e.get<int>());
      }
    } else {
      bad_field("rx_antennas", "expected an integer or an array of integers");
    }
  } else {
    c.rx_antennas.assign(static_cast<size_t>(c.receivers), 2);
  }

  validate(c);
  return c;
}

ScenarioConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  json j;
  j["receivers"] = c.receivers;
  j["tx_antennas"] = c.tx_antennas;
  j["rx_antennas"] = c.rx_antennas;
  j["paths"] = c.paths;
  j["region_size"] = c.region_size;
  j["snr_db"] = c.snr_db;
  j["noise_power"] = c.noise_power;
  j["nmse"] = c.nmse;
  j["max_step"] = c.max_step;
  j["scheme"] = scheme_name(c.scheme);
  j["algorithm"] = algorithm_name(c.algorithm);
  j["penalty_blp"] = c.penalty_blp;
  j["penalty_msp"] = c.penalty_msp;
  j["penalty_pp"] = c.penalty_pp;
  j["episodes"] = c.episodes;
  j["episode_slots"] = c.episode_slots;
  j["hidden_layers"] = c.hidden_layers;
  j["hidden_units"] = c.hidden_units;
  j["learning_rate"] = c.learning_rate;
  j["discount"] = c.discount;
  j["tau"] = c.tau;
  j["batch_size"] = c.batch_size;
  j["replay_capacity"] = c.replay_capacity;
  j["noise_start"] = c.noise_start;
  j["noise_decay"] = c.noise_decay;
  j["noise_floor"] = c.noise_floor;
  j["mc_samples"] = c.mc_samples;
  j["mc_samples_fast"] = c.mc_samples_fast;
  return j.dump(2) + "\n";
}

void validate(const ScenarioConfig& c) {
  if (c.receivers < 1) bad_field("receivers", "must be >= 1");
  if (c.tx_antennas < 1) bad_field("tx_antennas", "must be >= 1");
  if (static_cast<int>(c.rx_antennas.size()) != c.receivers)
    bad_field("rx_antennas", "array length must equal receivers");
  for (int m : c.rx_antennas)
    if (m < 1) bad_field("rx_antennas", "entries must be >= 1");
  if (c.paths < 1) bad_field("paths", "must be >= 1");
  if (c.region_size <= 0.0) bad_field("region_size", "must be > 0");
  if (c.noise_power <= 0.0) bad_field("noise_power", "must be > 0");
  if (c.nmse < 0.0) bad_field("nmse", "must be >= 0");
  if (c.max_step <= 0.0) bad_field("max_step", "must be > 0");
  if (c.algorithm == Algorithm::kTr && c.scheme != Scheme::kDs)
    bad_field("algorithm", "TR is defined only for the DS scheme");
  if (c.penalty_blp < 0.0) bad_field("penalty_blp", "must be >= 0");
  if (c.penalty_msp < 0.0) bad_field("penalty_msp", "must be >= 0");
  if (c.penalty_pp < 0.0) bad_field("penalty_pp", "must be >= 0");
  if (c.episodes < 0) bad_field("episodes", "must be >= 0");
  if (c.episode_slots < 1) bad_field("episode_slots", "must be >= 1");
  if (c.hidden_layers < 1) bad_field("hidden_layers", "must be >= 1");
  if (c.hidden_units < 1) bad_field("hidden_units", "must be >= 1");
  if (c.learning_rate < 0.0) bad_field("learning_rate", "must be >= 0");
  if (c.discount < 0.0 || c.discount >= 1.0) bad_field("discount", "must be in [0, 1)");
  if (c.tau <= 0.0 || c.tau > 1.0) bad_field("tau", "must be in (0, 1]");
  if (c.batch_size < 1) bad_field("batch_size", "must be >= 1");
  if (c.replay_capacity < c.batch_size)
    bad_field("replay_capacity", "must be >= batch_size");
  if (c.noise_start < 0.0) bad_field("noise_start", "must be >= 0");
  if (c.noise_decay <= 0.0 || c.noise_decay > 1.0)
    bad_field("noise_decay", "must be in (0, 1]");
  if (c.noise_floor < 0.0) bad_field("noise_floor", "must be >= 0");
  if (c.mc_samples < 2) bad_field("mc_samples", "must be >= 2");
  if (c.mc_samples_fast < 2) bad_field("mc_samples_fast", "must be >= 2");
}

}  // namespace mamimo

// Command-line front end. Everything here goes through the public C API so
// the binary doubles as a smoke test for the shared library surface.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mamimo/mamimo.h"

namespace {

[[noreturn]] void die(mam_status status, const char* errbuf) {
  std::cerr << "error (" << mam_status_name(status) << "): " << errbuf << "\n";
  std::exit(1);
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) parts.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current.push_back(c);
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& part : split_csv(text)) {
    try {
      size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      std::cerr << "error: " << what << ": \"" << part
                << "\" is not a number\n";
      std::exit(1);
    }
  }
  return out;
}

std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> out;
  for (const std::string& part : split_csv(text)) {
    try {
      size_t used = 0;
      const uint64_t v = std::stoull(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      std::cerr << "error: --seed: \"" << part
                << "\" is not a non-negative integer\n";
      std::exit(1);
    }
  }
  return out;
}

mam_config* load_config_or_die(const std::string& path, char* errbuf,
                               size_t errbuf_len) {
  if (path.empty()) return mam_config_default();
  mam_config* config = nullptr;
  const mam_status status =
      mam_config_load(path.c_str(), &config, errbuf, errbuf_len);
  if (status != MAM_OK) die(status, errbuf);
  return config;
}

void write_file_or_die(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    std::exit(1);
  }
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("mamimo ") + mam_version() +
               " - movable-antenna MIMO downlink trainer"};
  app.require_subcommand(1);

  std::string train_config, train_out = "runs/train";
  uint64_t train_seed = 1;
  CLI::App* train = app.add_subcommand(
      "train", "Train agents; writes manifest.json, train.csv, checkpoint.bin");
  train->add_option("--config", train_config,
                    "JSON config file (defaults when omitted)");
  train->add_option("--seed", train_seed, "Master RNG seed")
      ->capture_default_str();
  train->add_option("--out", train_out, "Output directory")
      ->capture_default_str();

  std::string eval_checkpoint, eval_overrides, eval_trace, eval_out;
  int eval_episodes = 10;
  uint64_t eval_seed = 1;
  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate a checkpoint noise-free; prints the summary JSON");
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint.bin path")
      ->required();
  eval->add_option("--overrides", eval_overrides,
                   "Partial config JSON merged over the checkpoint's config");
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes")
      ->capture_default_str();
  eval->add_option("--seed", eval_seed, "Evaluation RNG seed")
      ->capture_default_str();
  eval->add_option("--trace", eval_trace, "Optional per-slot JSONL trace path");
  eval->add_option("--out", eval_out, "Also write the summary JSON here");

  std::string sweep_config, sweep_axis, sweep_values, sweep_schemes;
  std::string sweep_seeds = "1", sweep_out = "runs/sweep.csv";
  int sweep_jobs = 1;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Train/evaluate a grid of (value, scheme, seed) cells");
  sweep->add_option("--config", sweep_config,
                    "Base JSON config file (defaults when omitted)");
  sweep->add_option("--axis", sweep_axis, "region | snr | nmse | slots")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated axis values")
      ->required();
  sweep->add_option("--schemes", sweep_schemes,
                    "Comma-separated subset of DS,RMA,FPA,TR")
      ->required();
  sweep->add_option("--seed", sweep_seeds, "Comma-separated seeds")
      ->capture_default_str();
  sweep->add_option("--jobs", sweep_jobs, "Worker threads")
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "Output CSV path")
      ->capture_default_str();

  std::string validate_level = "fast", validate_out;
  CLI::App* validate =
      app.add_subcommand("validate", "Run the self-validation suite");
  validate->add_option("--level", validate_level, "fast | full")
      ->capture_default_str();
  validate->add_option("--out", validate_out, "Optional JSON report path");

  CLI11_PARSE(app, argc, argv);

  char errbuf[1024] = {0};

  if (train->parsed()) {
    mam_config* config = load_config_or_die(train_config, errbuf, sizeof errbuf);
    char* manifest = nullptr;
    const mam_status status = mam_train(config, train_seed, train_out.c_str(),
                                        &manifest, errbuf, sizeof errbuf);
    mam_config_free(config);
    if (status != MAM_OK) die(status, errbuf);
    std::printf("wrote %s\n", manifest);
    mam_string_free(manifest);
    return 0;
  }

  if (eval->parsed()) {
    char* summary = nullptr;
    const mam_status status = mam_eval(
        eval_checkpoint.c_str(), eval_overrides.c_str(), eval_episodes,
        eval_seed, eval_trace.c_str(), &summary, errbuf, sizeof errbuf);
    if (status != MAM_OK) die(status, errbuf);
    std::fputs(summary, stdout);
    if (!eval_out.empty()) write_file_or_die(eval_out, summary);
    mam_string_free(summary);
    return 0;
  }

  if (sweep->parsed()) {
    mam_config* config = load_config_or_die(sweep_config, errbuf, sizeof errbuf);
    const std::vector<double> values = parse_doubles(sweep_values, "--values");
    const std::vector<std::string> schemes = split_csv(sweep_schemes);
    const std::vector<uint64_t> seeds = parse_seeds(sweep_seeds);
    std::vector<const char*> scheme_ptrs;
    for (const std::string& s : schemes) scheme_ptrs.push_back(s.c_str());
    const mam_status status = mam_sweep(
        config, sweep_axis.c_str(), values.data(), values.size(),
        scheme_ptrs.data(), scheme_ptrs.size(), seeds.data(), seeds.size(),
        sweep_jobs, sweep_out.c_str(), errbuf, sizeof errbuf);
    mam_config_free(config);
    if (status != MAM_OK) die(status, errbuf);
    std::printf("wrote %s\n", sweep_out.c_str());
    return 0;
  }

  // validate
  int all_passed = 0;
  char* report = nullptr;
  const mam_status status =
      mam_validate(validate_level.c_str(), /*verbose=*/1, &all_passed, &report,
                   errbuf, sizeof errbuf);
  if (status != MAM_OK) die(status, errbuf);
  if (!validate_out.empty()) write_file_or_die(validate_out, report);
  mam_string_free(report);
  std::printf("%s\n", all_passed ? "all checks passed" : "CHECKS FAILED");
  return all_passed ? 0 : 1;
}

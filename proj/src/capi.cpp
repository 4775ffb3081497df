#include "mamimo/mamimo.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "error.hpp"
#include "runner.hpp"
#include "validate.hpp"
#include "version.hpp"

struct mam_config {
  mamimo::ScenarioConfig impl;
};

namespace {

using nlohmann::json;

mam_status status_from(mamimo::ErrorCode code) {
  using mamimo::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return MAM_INVALID_ARGUMENT;
    case ErrorCode::kConfigInvalid: return MAM_CONFIG_INVALID;
    case ErrorCode::kNotPositiveDefinite: return MAM_NOT_POSITIVE_DEFINITE;
    case ErrorCode::kRegionTooSmall: return MAM_REGION_TOO_SMALL;
    case ErrorCode::kGridTooLarge: return MAM_GRID_TOO_LARGE;
    case ErrorCode::kNoEpisodes: return MAM_NO_EPISODES;
    case ErrorCode::kArchitectureMismatch: return MAM_ARCHITECTURE_MISMATCH;
    case ErrorCode::kRankDeficient: return MAM_RANK_DEFICIENT;
    case ErrorCode::kCheckpointInvalid: return MAM_CHECKPOINT_INVALID;
    case ErrorCode::kIo: return MAM_IO;
  }
  return MAM_INTERNAL;
}

void put_error(char* errbuf, size_t errbuf_len, const std::string& message) {
  if (errbuf == nullptr || errbuf_len == 0) return;
  const size_t n = std::min(message.size(), errbuf_len - 1);
  std::memcpy(errbuf, message.data(), n);
  errbuf[n] = '\0';
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
mam_status guarded(char* errbuf, size_t errbuf_len, Fn&& fn) {
  try {
    return fn();
  } catch (const mamimo::Error& e) {
    put_error(errbuf, errbuf_len, e.what());
    return status_from(e.code());
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return MAM_INTERNAL;
  } catch (...) {
    put_error(errbuf, errbuf_len, "unknown error");
    return MAM_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* mam_status_name(mam_status status) {
  switch (status) {
    case MAM_OK: return "Ok";
    case MAM_INVALID_ARGUMENT: return "InvalidArgument";
    case MAM_CONFIG_INVALID: return "ConfigInvalid";
    case MAM_NOT_POSITIVE_DEFINITE: return "NotPositiveDefinite";
    case MAM_REGION_TOO_SMALL: return "RegionTooSmall";
    case MAM_GRID_TOO_LARGE: return "GridTooLarge";
    case MAM_NO_EPISODES: return "NoEpisodes";
    case MAM_ARCHITECTURE_MISMATCH: return "ArchitectureMismatch";
    case MAM_RANK_DEFICIENT: return "RankDeficient";
    case MAM_CHECKPOINT_INVALID: return "CheckpointInvalid";
    case MAM_IO: return "Io";
    case MAM_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* mam_version(void) { return mamimo::kVersion; }

void mam_string_free(char* s) { std::free(s); }

mam_config* mam_config_default(void) { return new mam_config{}; }

mam_status mam_config_parse(const char* json_text, mam_config** out,
                            char* errbuf, size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, [&]() {
    if (json_text == nullptr || out == nullptr)
      mamimo::fail(mamimo::ErrorCode::kInvalidArgument,
                   "json and out must be non-null");
    *out = new mam_config{mamimo::config_from_json(json_text)};
    return MAM_OK;
  });
}

mam_status mam_config_load(const char* path, mam_config** out, char* errbuf,
                           size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, [&]() {
    if (path == nullptr || out == nullptr)
      mamimo::fail(mamimo::ErrorCode::kInvalidArgument,
                   "path and out must be non-null");
    *out = new mam_config{mamimo::config_from_file(path)};
    return MAM_OK;
  });
}

char* mam_config_to_json(const mam_config* config) {
  if (config == nullptr) return nullptr;
  return dup_string(mamimo::config_to_json(config->impl));
}

void mam_config_free(mam_config* config) { delete config; }

mam_status mam_train(const mam_config* config, uint64_t seed,
                     const char* out_dir, char** manifest_path_out,
                     char* errbuf, size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, [&]() {
    if (config == nullptr || out_dir == nullptr)
      mamimo::fail(mamimo::ErrorCode::kInvalidArgument,
                   "config and out_dir must be non-null");
    const mamimo::TrainResult result =
        mamimo::cmd_train(config->impl, seed, out_dir);
    if (manifest_path_out != nullptr)
      *manifest_path_out = dup_string(result.manifest_path);
    return MAM_OK;
  });
}

mam_status mam_eval(const char* checkpoint_path, const char* overrides_json,
                    int episodes, uint64_t seed, const char* trace_path,
                    char** summary_json_out, char* errbuf,
                    size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, [&]() {
    if (checkpoint_path == nullptr)
      mamimo::fail(mamimo::ErrorCode::kInvalidArgument,
                   "checkpoint_path must be non-null");
    const std::string summary = mamimo::cmd_eval(
        checkpoint_path, overrides_json ? overrides_json : "", episodes, seed,
        trace_path ? trace_path : "");
    if (summary_json_out != nullptr) *summary_json_out = dup_string(summary);
    return MAM_OK;
  });
}

mam_status mam_sweep(const mam_config* base, const char* axis,
                     const double* values, size_t num_values,
                     const char* const* schemes, size_t num_schemes,
                     const uint64_t* seeds, size_t num_seeds, int jobs,
                     const char* out_csv, char* errbuf, size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, [&]() {
    if (base == nullptr || axis == nullptr || out_csv == nullptr)
      mamimo::fail(mamimo::ErrorCode::kInvalidArgument,
                   "base, axis and out_csv must be non-null");
    mamimo::SweepSpec spec;
    spec.axis = axis;
    spec.values.assign(values, values + num_values);
    for (size_t i = 0; i < num_schemes; ++i)
      spec.schemes.emplace_back(schemes[i]);
    if (seeds != nullptr && num_seeds > 0)
      spec.seeds.assign(seeds, seeds + num_seeds);
    spec.jobs = jobs;
    mamimo::cmd_sweep(base->impl, spec, out_csv);
    return MAM_OK;
  });
}

mam_status mam_validate(const char* level, int verbose, int* all_passed_out,
                        char** report_json_out, char* errbuf,
                        size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, [&]() {
    if (level == nullptr)
      mamimo::fail(mamimo::ErrorCode::kInvalidArgument,
                   "level must be non-null");
    const mamimo::ValidateLevel lvl = mamimo::level_from_name(level);
    const auto on_result = [verbose](const mamimo::CheckResult& r) {
      if (verbose == 0) return;
      std::printf("[%s] %-22s %s (%.1f s)\n", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.detail.c_str(), r.seconds);
      std::fflush(stdout);
    };
    const std::vector<mamimo::CheckResult> results =
        mamimo::run_validation(lvl, on_result);
    const bool ok = mamimo::all_passed(results);
    if (all_passed_out != nullptr) *all_passed_out = ok ? 1 : 0;
    if (report_json_out != nullptr) {
      json report;
      report["format"] = "mamimo.validate.v1";
      report["level"] = level;
      report["all_passed"] = ok;
      report["checks"] = json::array();
      for (const mamimo::CheckResult& r : results)
        report["checks"].push_back({{"name", r.name},
                                    {"passed", r.passed},
                                    {"detail", r.detail},
                                    {"seconds", r.seconds}});
      *report_json_out = dup_string(report.dump(2) + "\n");
    }
    return MAM_OK;
  });
}

}  // extern "C"

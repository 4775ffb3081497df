#ifndef MAMIMO_MAMIMO_H
#define MAMIMO_MAMIMO_H

/* C interface to the movable-antenna MIMO downlink simulator and learner.
 *
 * Conventions:
 *  - Every fallible entry point returns a mam_status and, on failure, writes
 *    a human-readable message into the caller's errbuf (always
 *    NUL-terminated, truncated if needed).
 *  - Strings returned through char** out-parameters are heap-allocated and
 *    must be released with mam_string_free().
 *  - Out-parameters may be NULL when the caller does not want the value.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mam_status {
  MAM_OK = 0,
  MAM_INVALID_ARGUMENT = 1,
  MAM_CONFIG_INVALID = 2,
  MAM_NOT_POSITIVE_DEFINITE = 3,
  MAM_REGION_TOO_SMALL = 4,
  MAM_GRID_TOO_LARGE = 5,
  MAM_NO_EPISODES = 6,
  MAM_ARCHITECTURE_MISMATCH = 7,
  MAM_RANK_DEFICIENT = 8,
  MAM_CHECKPOINT_INVALID = 9,
  MAM_IO = 10,
  MAM_INTERNAL = 11
} mam_status;

/* Stable identifier for a status code, e.g. "ConfigInvalid". */
const char* mam_status_name(mam_status status);

/* Library version string, e.g. "0.1.0". */
const char* mam_version(void);

/* Releases a string returned by this library. NULL is a no-op. */
void mam_string_free(char* s);

/* ----------------------------------------------------------------------- */
/* Scenario configuration (opaque).                                         */

typedef struct mam_config mam_config;

/* Default scenario (2 receivers, 2x2 antennas, 3 paths, 3-wavelength
 * regions, 30 dB SNR, nmse 0.01, 300 episodes of 100 slots). Never fails. */
mam_config* mam_config_default(void);

/* Parses a JSON object. Unknown keys and invalid values are errors; missing
 * keys keep their defaults. */
mam_status mam_config_parse(const char* json, mam_config** out, char* errbuf,
                            size_t errbuf_len);

/* Reads and parses a JSON config file. */
mam_status mam_config_load(const char* path, mam_config** out, char* errbuf,
                           size_t errbuf_len);

/* Serializes the full effective configuration (all keys, two-space
 * indentation, trailing newline). Release with mam_string_free. */
char* mam_config_to_json(const mam_config* config);

void mam_config_free(mam_config* config);

/* ----------------------------------------------------------------------- */
/* Commands.                                                                */

/* Trains from scratch and writes manifest.json, train.csv and
 * checkpoint.bin under out_dir (created if missing). CSV and checkpoint
 * bytes depend only on (config, seed). */
mam_status mam_train(const mam_config* config, uint64_t seed,
                     const char* out_dir, char** manifest_path_out,
                     char* errbuf, size_t errbuf_len);

/* Loads a checkpoint, optionally merges overrides_json (a partial config
 * object; NULL or "" for none) and evaluates noise-free for the given
 * number of episodes. Writes the summary JSON to *summary_json_out. When
 * trace_path is non-NULL and non-empty, a JSON-lines per-slot trace is
 * written there. */
mam_status mam_eval(const char* checkpoint_path, const char* overrides_json,
                    int episodes, uint64_t seed, const char* trace_path,
                    char** summary_json_out, char* errbuf, size_t errbuf_len);

/* Trains and evaluates one cell per (value, scheme, seed) over the given
 * axis ("region", "snr", "nmse" or "slots") and writes a long-format CSV to
 * out_csv. Schemes are "DS", "RMA", "FPA" or "TR". seeds/num_seeds may be
 * NULL/0 for the default single seed. jobs is the worker thread count. */
mam_status mam_sweep(const mam_config* base, const char* axis,
                     const double* values, size_t num_values,
                     const char* const* schemes, size_t num_schemes,
                     const uint64_t* seeds, size_t num_seeds, int jobs,
                     const char* out_csv, char* errbuf, size_t errbuf_len);

/* Runs the self-validation suite at level "fast" or "full". Prints one line
 * per check to stdout when verbose is nonzero. Writes 1/0 to
 * *all_passed_out and a JSON report to *report_json_out. Returns MAM_OK
 * when the suite ran to completion, regardless of check outcomes. */
mam_status mam_validate(const char* level, int verbose, int* all_passed_out,
                        char** report_json_out, char* errbuf,
                        size_t errbuf_len);

#ifdef __cplusplus
}
#endif

#endif /* MAMIMO_MAMIMO_H */

#ifndef ARA_NAV_H
#define ARA_NAV_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Split selectors for [`ara_run_report_metrics`].
 */
#define ARA_SPLIT_LOW 0

#define ARA_SPLIT_HIGH 1

#define ARA_SPLIT_ALL 2

/**
 * Result codes.
 */
typedef enum AraStatus {
  ARA_STATUS_OK = 0,
  ARA_STATUS_NULL_ARGUMENT = 1,
  ARA_STATUS_INVALID_UTF8 = 2,
  /**
   * Episode or results document failed schema or invariant checks.
   */
  ARA_STATUS_FORMAT_ERROR = 3,
  ARA_STATUS_CONFIG_ERROR = 4,
  /**
   * An argument was out of range (empty text, unknown split, ...).
   */
  ARA_STATUS_INVALID_ARGUMENT = 5,
  ARA_STATUS_BACKEND_ERROR = 6,
  ARA_STATUS_IO_ERROR = 7,
  /**
   * A Rust panic was caught at the boundary.
   */
  ARA_STATUS_INTERNAL = 8,
} AraStatus;

/**
 * Parsed or generated episode set.
 */
typedef struct AraEpisodes AraEpisodes;

/**
 * Outcome of a benchmark run.
 */
typedef struct AraRunReport AraRunReport;

/**
 * Metrics over one split. `bertscore_mean` is meaningful only when
 * `has_bertscore` is non-zero.
 */
typedef struct AraMetrics {
  size_t n_episodes;
  size_t successes;
  double sr;
  double ne_mean;
  double bertscore_mean;
  uint8_t has_bertscore;
} AraMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *ara_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void ara_string_free(char *s);

/**
 * Parses an episode document (`{"episodes": [...]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum AraStatus ara_episodes_parse(const char *json, struct AraEpisodes **out);

/**
 * Generates `n` seeded synthetic episodes with default kinematics.
 *
 * # Safety
 * `out` must be writable.
 */
enum AraStatus ara_episodes_generate(size_t n, uint64_t seed, struct AraEpisodes **out);

/**
 * Number of episodes in the set; 0 for NULL.
 *
 * # Safety
 * `episodes` must be NULL or a live handle.
 */
size_t ara_episodes_len(const struct AraEpisodes *episodes);

/**
 * # Safety
 * `episodes` must be NULL or a live handle, not used afterwards.
 */
void ara_episodes_free(struct AraEpisodes *episodes);

/**
 * Rewrites `text` with the offline translator. `principles` is a set spec
 * (`"all"`, `"none"`, comma-separated ids); NULL means all.
 *
 * # Safety
 * String arguments must be NUL-terminated or NULL where allowed; `out` must
 * be writable.
 */
enum AraStatus ara_desk_translate(const char *text, const char *principles_spec, char **out);

/**
 * Renders the translator prompt for a principle set with the bundled
 * wording.
 *
 * # Safety
 * `principles_spec` must be NUL-terminated or NULL; `out` must be writable.
 */
enum AraStatus ara_render_prompt(const char *principles_spec, char **out);

/**
 * Similarity F1 between two instructions under the default hash embedder.
 *
 * # Safety
 * Both strings must be NUL-terminated; `out` must be writable.
 */
enum AraStatus ara_bertscore_f1(const char *original, const char *translated, double *out);

/**
 * Euclidean distance from (`fx`, `fy`) to the goal (`gx`, `gy`).
 */
double ara_navigation_error(double fx, double fy, double gx, double gy);

/**
 * Runs the benchmark offline. `config_json` is a run configuration document
 * layered over the defaults (NULL for defaults). Configurations that need a
 * completion backend build it from the document as the CLI does.
 *
 * # Safety
 * `episodes` must be a live handle; `config_json` NUL-terminated or NULL;
 * `out` writable.
 */
enum AraStatus ara_run_benchmark(const struct AraEpisodes *episodes,
                                 const char *config_json,
                                 struct AraRunReport **out);

/**
 * Metrics for one split (`ARA_SPLIT_LOW`, `ARA_SPLIT_HIGH`, `ARA_SPLIT_ALL`).
 *
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum AraStatus ara_run_report_metrics(const struct AraRunReport *report,
                                      uint32_t split,
                                      struct AraMetrics *out);

/**
 * Number of aborted episodes (excluded from the metrics).
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
size_t ara_run_report_aborted_count(const struct AraRunReport *report);

/**
 * The per-episode results as JSON lines.
 *
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum AraStatus ara_run_report_results_jsonl(const struct AraRunReport *report, char **out);

/**
 * # Safety
 * `report` must be NULL or a live handle, not used afterwards.
 */
void ara_run_report_free(struct AraRunReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARA_NAV_H */

#ifndef FPGA_DEFRAG_H
#define FPGA_DEFRAG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  FD_STATUS_OK = 0,
  FD_STATUS_NULL_ARGUMENT = 1,
  FD_STATUS_INVALID_UTF8 = 2,
  FD_STATUS_PARSE_ERROR = 3,
  FD_STATUS_INVALID_MOVE = 4,
  FD_STATUS_PRECONDITION = 5,
  FD_STATUS_INVALID_ARGUMENT = 6,
  FD_STATUS_OUT_OF_RANGE = 7,
  FD_STATUS_PANIC = 8,
} FdStatus;

typedef enum {
  FD_REACHABILITY_REACHED = 0,
  FD_REACHABILITY_UNREACHABLE = 1,
  FD_REACHABILITY_TRUNCATED = 2,
} FdReachability;

typedef enum {
  FD_STRATEGY_LEFT_RIGHT_SHIFT = 0,
  FD_STRATEGY_GREEDY = 1,
  FD_STRATEGY_TABU = 2,
} FdStrategy;

typedef enum {
  FD_POLICY_NONE = 0,
  FD_POLICY_GREEDY = 1,
  FD_POLICY_TABU = 2,
} FdPolicy;

/**
 * Opaque layout handle.
 */
typedef struct FdLayout FdLayout;

/**
 * Opaque strategy report handle.
 */
typedef struct FdReport FdReport;

typedef struct {
  size_t device_length;
  size_t module_count;
  size_t free_slots;
  size_t free_interval_count;
  size_t max_free_interval;
  double fitness;
  double density;
} FdMetrics;

typedef struct {
  size_t move_count;
  /**
   * Number of leading moves that lead to the best layout.
   */
  size_t best_step;
  size_t best_max_free;
  double best_fitness;
  size_t iterations_used;
} FdReportSummary;

typedef struct {
  size_t optimum_max_free;
  size_t min_moves_to_optimum;
  size_t states_explored;
  bool truncated;
} FdOracleResult;

typedef struct {
  FdReachability outcome;
  /**
   * Valid when `outcome` is `Reached`.
   */
  size_t moves;
  size_t states_explored;
} FdTargetResult;

typedef struct {
  uint64_t makespan;
  size_t defrag_invocations;
  size_t relocations;
  uint64_t total_relocation_cost;
  size_t rejected_count;
} FdMakespanResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread (empty after success).
 * The pointer stays valid until the next library call on this thread.
 */
const char *fd_last_error_message(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void fd_string_free(char *s);

/**
 * Parses an instance in the text format.
 *
 * # Safety
 * `source` must be a nul-terminated string; `layout_out` must be writable.
 */
FdStatus fd_layout_parse(const char *source, FdLayout **layout_out);

/**
 * Releases a layout. Null is ignored.
 *
 * # Safety
 * `layout` must come from this library and not be freed twice.
 */
void fd_layout_free(FdLayout *layout);

/**
 * Serializes a layout; free the result with `fd_string_free`.
 *
 * # Safety
 * `layout` must be a live handle; `text_out` must be writable.
 */
FdStatus fd_layout_to_text(const FdLayout *layout, char **text_out);

/**
 * # Safety
 * `layout` must be a live handle; `metrics_out` must be writable.
 */
FdStatus fd_layout_metrics(const FdLayout *layout, FdMetrics *metrics_out);

/**
 * Applies one jump move, producing a new layout; the input is unchanged.
 *
 * # Safety
 * `layout` must be a live handle, `module_id` nul-terminated and
 * `layout_out` writable.
 */
FdStatus fd_layout_apply_move(const FdLayout *layout,
                              const char *module_id,
                              size_t new_start,
                              FdLayout **layout_out);

/**
 * Runs a strategy (an `FdStrategy` value). `max_iterations` bounds tabu search (0 selects the
 * default 2n^2) and is ignored by the other strategies.
 *
 * # Safety
 * `layout` must be a live handle; `report_out` must be writable.
 */
FdStatus fd_defrag(const FdLayout *layout,
                   uint32_t strategy,
                   size_t max_iterations,
                   FdReport **report_out);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must come from this library and not be freed twice.
 */
void fd_report_free(FdReport *report);

/**
 * # Safety
 * `report` must be a live handle; `summary_out` must be writable.
 */
FdStatus fd_report_summary(const FdReport *report, FdReportSummary *summary_out);

/**
 * Move `index` of the report. The module id is a new string owned by the
 * caller.
 *
 * # Safety
 * `report` must be a live handle; both out pointers must be writable.
 */
FdStatus fd_report_move(const FdReport *report,
                        size_t index,
                        char **module_id_out,
                        size_t *new_start_out);

/**
 * Copy of the best layout found, as a new handle.
 *
 * # Safety
 * `report` must be a live handle; `layout_out` must be writable.
 */
FdStatus fd_report_best_layout(const FdReport *report, FdLayout **layout_out);

/**
 * Exact optimum by breadth-first search. `budget` 0 selects the default.
 *
 * # Safety
 * `layout` must be a live handle; `result_out` must be writable.
 */
FdStatus fd_oracle_optimum(const FdLayout *layout,
                           size_t budget,
                           bool interchangeable,
                           FdOracleResult *result_out);

/**
 * Fewest moves until a free interval of at least `target` slots exists.
 *
 * # Safety
 * `layout` must be a live handle; `result_out` must be writable.
 */
FdStatus fd_oracle_min_moves(const FdLayout *layout,
                             size_t target,
                             size_t budget,
                             bool interchangeable,
                             FdTargetResult *result_out);

/**
 * Generates one seeded workload and simulates it on a homogeneous device
 * under `policy` (an `FdPolicy` value).
 *
 * # Safety
 * `result_out` must be writable.
 */
FdStatus fd_simulate_makespan(size_t device_length,
                              size_t count,
                              double size_mean,
                              double duration_mean,
                              uint64_t seed,
                              uint32_t policy,
                              FdMakespanResult *result_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPGA_DEFRAG_H */

#ifndef DAMPDE_H
#define DAMPDE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dampde_status {
    DAMPDE_OK = 0,
    DAMPDE_ERR_NUMERIC = 1,
    DAMPDE_ERR_CONFIG = 2,
    DAMPDE_ERR_INVALID_ARGUMENT = 3
} dampde_status;

/* Library version as "major.minor.patch". */
const char* dampde_version(void);

/* Message of the most recent failing call on this thread; empty if none. */
const char* dampde_last_error(void);

/* A configured run of one subcommand. Not thread-safe; use one job per
 * thread. Outputs stay valid until the next run or destroy on the job. */
typedef struct dampde_job dampde_job;

dampde_job* dampde_job_create(void);
void dampde_job_destroy(dampde_job* job);

/* Installs the JSON configuration document. Optional; defaults apply when
 * never called. Validation happens at run time. */
dampde_status dampde_job_set_config_json(dampde_job* job, const char* json_text);

/* String-typed run options:
 *   "threads"      positive worker count ("0" = one per hardware thread)
 *   "svg"          "true"/"false": also emit a log-log plot (study modes)
 *   "dump-fields"  "true"/"false": nodal snapshot CSVs (simulate mode)
 *   "n"            mesh resolution override
 *   "m"            time step count override
 *   "m-list"       comma-separated step counts for time-refinement sweeps
 *   "n-list"       comma-separated resolutions for space-refinement sweeps */
dampde_status dampde_job_set_option(dampde_job* job, const char* key, const char* value);

/* mode: "simulate", "convergence-time", "convergence-space", "optimize",
 * "optimize-convergence", or "verify". Returns DAMPDE_OK on success,
 * DAMPDE_ERR_CONFIG on invalid configuration, DAMPDE_ERR_NUMERIC on
 * numerical failure. After DAMPDE_ERR_NUMERIC the outputs are still
 * populated with whatever completed. */
dampde_status dampde_job_run(dampde_job* job, const char* mode);

/* Results of the last run: named text documents (CSV, SVG, plain text). */
size_t dampde_job_output_count(const dampde_job* job);
const char* dampde_job_output_name(const dampde_job* job, size_t index);
const char* dampde_job_output_text(const dampde_job* job, size_t index);

/* Human-readable one-paragraph result summary of the last run. */
const char* dampde_job_summary(const dampde_job* job);

#ifdef __cplusplus
}
#endif

#endif /* DAMPDE_H */

/* C interface to the quasilinear coupled-Schrodinger solver.
 *
 * All functions are thread-compatible but not thread-safe on shared handles.
 * Every entry point returns a qlss_status; out-parameters are written only on
 * QLSS_OK.  qlss_last_error() describes the most recent failure on the calling
 * thread.
 */
#ifndef QLSS_H
#define QLSS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qlss_status {
    QLSS_OK = 0,
    QLSS_ERR_INVALID_ARGUMENT = 1, /* bad pointer, range, or handle misuse */
    QLSS_ERR_PARSE = 2,            /* config text rejected */
    QLSS_ERR_PRECONDITION = 3,     /* preflight checks failed hard */
    QLSS_ERR_IO = 4,               /* file could not be read or written */
    QLSS_ERR_GEOMETRY = 5,         /* mountain-pass geometry not attainable */
    QLSS_ERR_INTERNAL = 6,         /* unexpected failure */
} qlss_status;

typedef struct qlss_config qlss_config; /* opaque parsed run configuration */
typedef struct qlss_report qlss_report; /* opaque JSON result document */

/* Library version string, e.g. "0.1.0".  Never NULL. */
const char* qlss_version(void);

/* Stable name for a status code, e.g. "QLSS_ERR_PARSE". */
const char* qlss_status_name(qlss_status status);

/* Message for the last failure on this thread; empty string if none. */
const char* qlss_last_error(void);

/* --- configuration ------------------------------------------------------ */

qlss_status qlss_config_parse(const char* json_text, qlss_config** out);
qlss_status qlss_config_load(const char* path, qlss_config** out);
/* Replace the epsilon ladder with the single value eps (0 < eps <= 1). */
qlss_status qlss_config_set_epsilon(qlss_config* cfg, double eps);
qlss_status qlss_config_set_output_dir(qlss_config* cfg, const char* dir);
void qlss_config_free(qlss_config* cfg);

/* --- runs ---------------------------------------------------------------- */

/* Feasibility checks only; never writes files.  Returns QLSS_OK whenever the
 * checks ran, including when they failed; read the verdict from the report. */
qlss_status qlss_preflight(const qlss_config* cfg, qlss_report** out);

/* Solve every epsilon in the config and write artifacts to the output
 * directory.  Returns QLSS_OK when the computation ran to completion; whether
 * the runs converged and verified is reported by qlss_report_ok. */
qlss_status qlss_solve(const qlss_config* cfg, qlss_report** out);

/* Solve the whole epsilon ladder and append concentration trend checks. */
qlss_status qlss_sweep(const qlss_config* cfg, qlss_report** out);

/* --- reports ------------------------------------------------------------- */

/* 1 when every check in the report passed, else 0. */
int qlss_report_ok(const qlss_report* rep);

/* Borrowed pointer to the report serialized as JSON; freed with the report. */
const char* qlss_report_json(const qlss_report* rep);

void qlss_report_free(qlss_report* rep);

/* --- dual transform ------------------------------------------------------ */

/* Evaluate the transform at t.  Any of f, f_prime, f_second may be NULL. */
qlss_status qlss_transform_eval(double t, double* f, double* f_prime,
                                double* f_second);

/* Write a CSV table of the transform on [t_min, t_max] with step t_step to
 * path, or to stdout when path is NULL or empty. */
qlss_status qlss_transform_table(double t_min, double t_max, double t_step,
                                 const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QLSS_H */

#ifndef MLQMC_H
#define MLQMC_H

/*
 * C interface to the multilevel quasi-Monte Carlo engine. A session holds
 * one configuration plus the artifacts of the most recent run; every call
 * reports trouble through a status code, with the message available from
 * mlqmc_last_error. Strings returned by the library are owned by the
 * session and stay valid until the next call on it.
 */

#include <stdint.h>

#ifndef MLQMC_API
#define MLQMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mlqmc_session mlqmc_session;

typedef enum mlqmc_status {
    MLQMC_OK = 0,
    MLQMC_E_INPUT = 1,      /* bad argument or precondition */
    MLQMC_E_PARSE = 2,      /* malformed file or config text */
    MLQMC_E_CONFIG = 3,     /* inconsistent configuration */
    MLQMC_E_NUMERIC = 4,    /* solver or conditioning failure */
    MLQMC_E_IO = 5,         /* file system trouble */
    MLQMC_E_VALIDATION = 6, /* a requested validation check failed */
    MLQMC_E_UNKNOWN = 7
} mlqmc_status;

MLQMC_API const char* mlqmc_version(void);
MLQMC_API const char* mlqmc_status_name(mlqmc_status status);

MLQMC_API mlqmc_session* mlqmc_session_create(void);
MLQMC_API void mlqmc_session_destroy(mlqmc_session* session);

/* Message of the most recent failing call on this session. */
MLQMC_API const char* mlqmc_last_error(const mlqmc_session* session);

/* Replace the session configuration from a file or from key=value text. */
MLQMC_API mlqmc_status mlqmc_load_config_file(mlqmc_session* session,
                                              const char* path);
MLQMC_API mlqmc_status mlqmc_load_config_text(mlqmc_session* session,
                                              const char* text);

/* Apply one key=value override on top of the current configuration. */
MLQMC_API mlqmc_status mlqmc_set_option(mlqmc_session* session,
                                        const char* key, const char* value);

/*
 * Full multilevel run over the configured approaches and tolerances.
 * Writes levels CSVs, tolerances.csv and report.json under out_dir (NULL
 * uses the configured output directory). Missing a statistical tolerance
 * is not an error; query mlqmc_tolerance_met afterwards.
 */
MLQMC_API mlqmc_status mlqmc_run(mlqmc_session* session, const char* out_dir);

/* Evaluation-point plans, one hierarchy_<approach>.csv per approach. */
MLQMC_API mlqmc_status mlqmc_hierarchy(mlqmc_session* session,
                                       const char* out_dir);

/*
 * Sample the random field at npoints random mesh locations nsamples times
 * and test the empirical covariance against the truncated analytic one;
 * deviations beyond 4 standard errors give MLQMC_E_VALIDATION. A nonzero
 * zero_xi zeroes the random coordinates instead, checking that the field
 * collapses to its mean. *max_se_out (optional) receives the worst
 * deviation in standard-error units.
 */
MLQMC_API mlqmc_status mlqmc_field_validate(mlqmc_session* session,
                                            int npoints, int nsamples,
                                            int zero_xi, const char* out_dir,
                                            double* max_se_out);

/* Reference quadrature rules for levels 0..max_level as one CSV file. */
MLQMC_API mlqmc_status mlqmc_rules_dump(mlqmc_session* session, int max_level,
                                        const char* out_path);

/* Construct a rank-1 lattice generating vector (n points, s dimensions)
 * and write it one integer per line. */
MLQMC_API mlqmc_status mlqmc_cbc(mlqmc_session* session, uint64_t n, int s,
                                 const char* out_path);

/* JSON report of the most recent run; NULL before any run. */
MLQMC_API const char* mlqmc_summary_json(const mlqmc_session* session);

/* 1 or 0 for the most recent run; -1 before any run. */
MLQMC_API int mlqmc_tolerance_met(const mlqmc_session* session);

#ifdef __cplusplus
}
#endif

#endif /* MLQMC_H */

#include "mlqmc/mlqmc.h"

#include <exception>
#include <new>
#include <string>

#include "config.hpp"
#include "driver.hpp"
#include "util.hpp"

struct mlqmc_session {
    mlqmc::Config config;
    std::string last_error;
    std::string summary;
    int met = -1;
};

namespace {

using mlqmc::ErrorKind;

mlqmc_status status_of(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::input: return MLQMC_E_INPUT;
    case ErrorKind::parse: return MLQMC_E_PARSE;
    case ErrorKind::config: return MLQMC_E_CONFIG;
    case ErrorKind::numeric: return MLQMC_E_NUMERIC;
    case ErrorKind::io: return MLQMC_E_IO;
    case ErrorKind::validation: return MLQMC_E_VALIDATION;
    }
    return MLQMC_E_UNKNOWN;
}

// No exception may cross the C boundary; translate into a status and keep
// the message on the session.
template <typename F>
mlqmc_status guarded(mlqmc_session* session, F&& body) {
    if (!session) return MLQMC_E_INPUT;
    session->last_error.clear();
    try {
        body();
        return MLQMC_OK;
    } catch (const mlqmc::Error& e) {
        session->last_error = e.what();
        return status_of(e.kind());
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return MLQMC_E_UNKNOWN;
    } catch (...) {
        session->last_error = "unidentified failure";
        return MLQMC_E_UNKNOWN;
    }
}

const char* required(const char* arg, const char* what) {
    if (!arg) mlqmc::fail(ErrorKind::input, std::string(what) + " is null");
    return arg;
}

} // namespace

extern "C" {

const char* mlqmc_version(void) { return "1.0.0"; }

const char* mlqmc_status_name(mlqmc_status status) {
    switch (status) {
    case MLQMC_OK: return "ok";
    case MLQMC_E_INPUT: return "input";
    case MLQMC_E_PARSE: return "parse";
    case MLQMC_E_CONFIG: return "config";
    case MLQMC_E_NUMERIC: return "numeric";
    case MLQMC_E_IO: return "io";
    case MLQMC_E_VALIDATION: return "validation";
    case MLQMC_E_UNKNOWN: return "unknown";
    }
    return "unknown";
}

mlqmc_session* mlqmc_session_create(void) {
    return new (std::nothrow) mlqmc_session;
}

void mlqmc_session_destroy(mlqmc_session* session) { delete session; }

const char* mlqmc_last_error(const mlqmc_session* session) {
    return session ? session->last_error.c_str() : "null session";
}

mlqmc_status mlqmc_load_config_file(mlqmc_session* session, const char* path) {
    return guarded(session, [&] {
        session->config = mlqmc::load_config_file(required(path, "path"));
    });
}

mlqmc_status mlqmc_load_config_text(mlqmc_session* session, const char* text) {
    return guarded(session, [&] {
        session->config = mlqmc::parse_config_text(required(text, "text"));
    });
}

mlqmc_status mlqmc_set_option(mlqmc_session* session, const char* key,
                              const char* value) {
    return guarded(session, [&] {
        mlqmc::apply_option(session->config, required(key, "key"),
                            required(value, "value"));
    });
}

mlqmc_status mlqmc_run(mlqmc_session* session, const char* out_dir) {
    return guarded(session, [&] {
        mlqmc::RunOutcome outcome =
            mlqmc::run_all(session->config, out_dir ? out_dir : "");
        session->summary = std::move(outcome.report_json);
        session->met = outcome.all_met ? 1 : 0;
    });
}

mlqmc_status mlqmc_hierarchy(mlqmc_session* session, const char* out_dir) {
    return guarded(session, [&] {
        mlqmc::write_hierarchy_files(session->config, out_dir ? out_dir : "");
    });
}

mlqmc_status mlqmc_field_validate(mlqmc_session* session, int npoints,
                                  int nsamples, int zero_xi,
                                  const char* out_dir, double* max_se_out) {
    return guarded(session, [&] {
        const mlqmc::FieldValidation report = mlqmc::validate_field(
            session->config, npoints, nsamples, zero_xi != 0,
            out_dir ? out_dir : "");
        if (max_se_out) *max_se_out = report.max_se;
        if (!report.passed)
            mlqmc::fail(ErrorKind::validation,
                        "empirical covariance deviates by " +
                            mlqmc::format_double(report.max_se) +
                            " standard errors (limit 4)");
    });
}

mlqmc_status mlqmc_rules_dump(mlqmc_session* session, int max_level,
                              const char* out_path) {
    return guarded(session, [&] {
        mlqmc::write_rules_csv_file(max_level, required(out_path, "out_path"));
    });
}

mlqmc_status mlqmc_cbc(mlqmc_session* session, uint64_t n, int s,
                       const char* out_path) {
    return guarded(session, [&] {
        mlqmc::write_genvec_file(n, s, required(out_path, "out_path"));
    });
}

const char* mlqmc_summary_json(const mlqmc_session* session) {
    if (!session || session->summary.empty()) return nullptr;
    return session->summary.c_str();
}

int mlqmc_tolerance_met(const mlqmc_session* session) {
    return session ? session->met : -1;
}

} // extern "C"

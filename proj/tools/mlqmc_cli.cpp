#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlqmc/mlqmc.h"

namespace {

// Options shared by the config-driven subcommands. Applied in a fixed
// order: the file first, then each flag as an override.
struct Common {
    std::string config_path, approach, eps, seed, threads, out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path,
                    "configuration file (key=value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--approach", c.approach, "nna, gna, lna or all");
    cmd->add_option("--eps", c.eps, "comma-separated tolerance list");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--threads", c.threads, "worker cap, 0 = all cores");
    cmd->add_option("--out", c.out, "output directory");
}

int bail(mlqmc_session* s, mlqmc_status st) {
    std::fprintf(stderr, "mlqmc: %s error: %s\n", mlqmc_status_name(st),
                 mlqmc_last_error(s));
    return static_cast<int>(st);
}

int apply_common(mlqmc_session* s, const Common& c) {
    mlqmc_status st = MLQMC_OK;
    if (!c.config_path.empty())
        if ((st = mlqmc_load_config_file(s, c.config_path.c_str())) != MLQMC_OK)
            return bail(s, st);
    const std::pair<const char*, const std::string*> overrides[] = {
        {"approach", &c.approach}, {"eps", &c.eps},   {"seed", &c.seed},
        {"threads", &c.threads},   {"out", &c.out},
    };
    for (const auto& [key, value] : overrides)
        if (!value->empty())
            if ((st = mlqmc_set_option(s, key, value->c_str())) != MLQMC_OK)
                return bail(s, st);
    return 0;
}

int do_run(mlqmc_session* s) {
    const mlqmc_status st = mlqmc_run(s, nullptr);
    if (st != MLQMC_OK) return bail(s, st);
    const auto doc = nlohmann::json::parse(mlqmc_summary_json(s));
    for (const auto& run : doc.at("runs"))
        std::printf("%s eps=%.6g: estimate=%.9g achieved=%.3g "
                    "total_units=%.6g levels=%zu%s\n",
                    run.at("approach").get<std::string>().c_str(),
                    run.at("eps").get<double>(),
                    run.at("estimate").get<double>(),
                    run.at("achieved_error").get<double>(),
                    run.at("totals").at("units").get<double>(),
                    run.at("levels").size(),
                    run.at("tolerance_met").get<bool>()
                        ? ""
                        : "  [tolerance not met]");
    if (mlqmc_tolerance_met(s) == 0)
        std::fprintf(stderr, "mlqmc: warning: some runs missed their "
                             "tolerance; partial results were written\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel quasi-Monte Carlo engine for the slope "
                 "displacement problem"};
    app.set_version_flag("--version", std::string(mlqmc_version()));
    app.require_subcommand(1);

    Common c_run, c_hier, c_fv;

    CLI::App* run_cmd = app.add_subcommand(
        "run", "estimate the quantity of interest for every configured "
               "approach and tolerance");
    add_common(run_cmd, c_run);

    CLI::App* hier_cmd = app.add_subcommand(
        "hierarchy", "dump the evaluation-point plan per approach");
    add_common(hier_cmd, c_hier);

    CLI::App* fv_cmd = app.add_subcommand(
        "field-validate", "covariance check of the sampled random field");
    add_common(fv_cmd, c_fv);
    int fv_points = 20;
    int fv_samples = 20000;
    bool fv_zero = false;
    fv_cmd->add_option("--points", fv_points, "random evaluation locations")
        ->check(CLI::PositiveNumber);
    fv_cmd->add_option("--samples", fv_samples, "field realizations")
        ->check(CLI::PositiveNumber);
    fv_cmd->add_flag("--zero-xi", fv_zero,
                     "zero the random coordinates (constant-field check)");

    CLI::App* rules_cmd = app.add_subcommand(
        "rules-dump", "write the reference quadrature rules as CSV");
    int rules_level = 6;
    std::string rules_file = "rules.csv";
    rules_cmd->add_option("--max-level", rules_level,
                          "dump rules for levels 0..N");
    rules_cmd->add_option("--file", rules_file, "output CSV path");

    CLI::App* cbc_cmd =
        app.add_subcommand("cbc", "construct a lattice generating vector");
    std::uint64_t cbc_n = 8192;
    int cbc_s = 400;
    std::string cbc_file = "genvec.txt";
    cbc_cmd->add_option("--points", cbc_n,
                        "lattice size (prime or power of two)");
    cbc_cmd->add_option("--dims", cbc_s, "dimensions");
    cbc_cmd->add_option("--file", cbc_file, "output path");

    CLI11_PARSE(app, argc, argv);

    std::unique_ptr<mlqmc_session, decltype(&mlqmc_session_destroy)> session(
        mlqmc_session_create(), &mlqmc_session_destroy);
    if (!session) {
        std::fprintf(stderr, "mlqmc: out of memory\n");
        return 1;
    }
    mlqmc_session* s = session.get();

    if (run_cmd->parsed()) {
        if (int rc = apply_common(s, c_run)) return rc;
        return do_run(s);
    }
    if (hier_cmd->parsed()) {
        if (int rc = apply_common(s, c_hier)) return rc;
        const mlqmc_status st = mlqmc_hierarchy(s, nullptr);
        if (st != MLQMC_OK) return bail(s, st);
        std::printf("hierarchy plans written\n");
        return 0;
    }
    if (fv_cmd->parsed()) {
        if (int rc = apply_common(s, c_fv)) return rc;
        double max_se = 0.0;
        const mlqmc_status st = mlqmc_field_validate(
            s, fv_points, fv_samples, fv_zero ? 1 : 0, nullptr, &max_se);
        if (st == MLQMC_OK) {
            std::printf("covariance check passed: worst deviation %.3g "
                        "standard errors\n",
                        max_se);
            return 0;
        }
        if (st == MLQMC_E_VALIDATION) {
            std::fprintf(stderr, "mlqmc: %s\n", mlqmc_last_error(s));
            return static_cast<int>(st);
        }
        return bail(s, st);
    }
    if (rules_cmd->parsed()) {
        const mlqmc_status st =
            mlqmc_rules_dump(s, rules_level, rules_file.c_str());
        if (st != MLQMC_OK) return bail(s, st);
        std::printf("wrote %s\n", rules_file.c_str());
        return 0;
    }
    if (cbc_cmd->parsed()) {
        const mlqmc_status st = mlqmc_cbc(s, cbc_n, cbc_s, cbc_file.c_str());
        if (st != MLQMC_OK) return bail(s, st);
        std::printf("wrote %s\n", cbc_file.c_str());
        return 0;
    }
    return 0;
}

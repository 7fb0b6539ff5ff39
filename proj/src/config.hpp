#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fem.hpp"
#include "problem.hpp"

namespace mlqmc {

// Everything a run needs, straight from key=value text plus defaults. The
// field is parameterized either by the lognormal moments (mean/stddev of
// the exponentiated field) or directly by the Gaussian mean; exactly one
// of the two blocks may appear in a config file.
struct Config {
    std::string mesh = "builtin"; // "builtin" or a mesh file path
    std::string approach = "all"; // nna | gna | lna | all
    std::vector<double> eps;      // tolerance list; required for runs
    int max_level = 6;
    std::vector<std::uint64_t> initial_n = {8, 8, 8}; // warm-up per level;
                                                      // length = starting levels
    int shifts = 10;
    double growth_factor = 2.0;
    std::uint64_t seed = 1;
    int s = 400;
    int threads = 0;
    std::string genvec; // path; empty = embedded vector
    std::string out = "out";

    double matern_nu = 2.0;
    double matern_lambda = 0.3;
    bool has_matern_sigma2 = false;
    double matern_sigma2 = 1.0;

    bool has_lognormal_block = true; // default parameterization
    double lognormal_mean = 8020.0;
    double lognormal_stddev = 400.0;
    bool has_gaussian_block = false;
    double gaussian_mean = 0.0;

    double young = 30e6;
    double poisson = 0.25;
    double density = 1330.0;
    double gravity = 9.81;
};

// Parse key=value text ('#' comments allowed). Unknown and repeated keys
// are rejected; referenced files must exist; the file must contain exactly
// one field-parameter block.
Config parse_config_text(const std::string& text);
Config load_config_file(const std::string& path);

// Apply one key=value override on top of an existing config (CLI flags).
void apply_option(Config& config, const std::string& key,
                  const std::string& value);

// Canonical echo: every effective key in fixed order, doubles at full
// precision, so re-parsing reproduces the identical configuration.
std::string echo_config(const Config& config);

Material material_of(const Config& config);
FieldModel field_model_of(const Config& config);
Mesh mesh_of(const Config& config);
std::vector<std::uint64_t> genvec_of(const Config& config);
std::vector<Approach> approaches_of(const Config& config);
EstimatorConfig estimator_config_of(const Config& config, double eps);

} // namespace mlqmc

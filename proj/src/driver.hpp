#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace mlqmc {

struct RunOutcome {
    std::vector<RunRecord> records;
    std::string report_json; // same text as the report.json file
    bool all_met = true;     // every run reached its tolerance
};

// Full experiment: every configured approach at every tolerance, tolerance
// order as given, approaches sharing eigendecompositions and each approach
// reusing its samples across tolerances. Writes the report files under
// out_dir (config.out when empty).
RunOutcome run_all(const Config& config, const std::string& out_dir);

// Evaluation-point plans for the configured approaches, one
// hierarchy_<approach>.csv per approach.
void write_hierarchy_files(const Config& config, const std::string& out_dir);

struct FieldValidation {
    int npoints = 0;
    int nsamples = 0;
    double max_se = 0.0; // worst covariance deviation, standard-error units
    bool passed = true;
};

// Draws nsamples field realizations at npoints random mesh locations and
// checks the empirical covariance (the mean is known) against the
// truncated analytic covariance entrywise; deviations beyond 4 standard
// errors fail. zero_xi zeroes the random coordinates instead, verifying
// that every value collapses to the mean. Writes spectrum.csv.
FieldValidation validate_field(const Config& config, int npoints,
                               int nsamples, bool zero_xi,
                               const std::string& out_dir);

// Reference quadrature rules for levels 0..max_level as one CSV file.
void write_rules_csv_file(int max_level, const std::string& path);

// Construct a generating vector and write it one integer per line, the
// format load_generating_vector reads back.
void write_genvec_file(std::uint64_t n, int s, const std::string& path);

} // namespace mlqmc

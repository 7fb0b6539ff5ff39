#pragma once

#include <string>
#include <vector>

#include "estimator.hpp"

namespace mlqmc {

// One completed estimator run tagged with what produced it.
struct RunRecord {
    std::string approach;
    double eps = 0.0;
    RunResult result;
};

// The CSV and JSON builders return text so callers can inspect a report
// without touching the file system.
std::string levels_csv(const RunResult& result);
std::string tolerances_csv(const std::vector<RunRecord>& records);
std::string report_json_text(const std::string& config_text,
                             const std::vector<RunRecord>& records);

// Writes one levels_<approach>_eps<k>.csv per run (k indexes the tolerance
// order), a plain levels.csv when there is exactly one run, tolerances.csv,
// and report.json under out_dir, creating the directory if needed.
void write_report_files(const std::string& out_dir,
                        const std::string& config_text,
                        const std::vector<RunRecord>& records);

} // namespace mlqmc

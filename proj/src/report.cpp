#include "report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "util.hpp"

namespace mlqmc {

namespace {

using nlohmann::json;

// JSON has no NaN; emit null so consumers see an explicit gap.
json num(double v) { return std::isfinite(v) ? json(v) : json(); }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
    out << text;
    if (!out.flush()) fail(ErrorKind::io, "short write to " + path);
}

json level_json(const LevelReport& row) {
    json j;
    j["level"] = row.level;
    j["n"] = row.n;
    j["shifts"] = row.shifts;
    j["mean_P"] = num(row.mean_P);
    j["var_P"] = num(row.var_P);
    j["mean_dP"] = num(row.mean_dP);
    j["var_dP"] = num(row.var_dP);
    j["mean_Pc"] = num(row.mean_Pc);
    j["var_Pc"] = num(row.var_Pc);
    j["rho"] = num(row.rho);
    j["eq1_residual"] = num(row.eq1_residual);
    j["V"] = num(row.V);
    j["V_coarse"] = num(row.V_coarse);
    j["unit_online"] = num(row.unit_online);
    j["cost_online_units"] = num(row.cost_online_units);
    j["cost_offline_units"] = num(row.cost_offline_units);
    j["hypothetical_finest_field_units"] =
        num(row.hypothetical_finest_field_units);
    return j;
}

} // namespace

std::string levels_csv(const RunResult& result) {
    std::ostringstream out;
    out << "level,N,R,mean_P,var_P,mean_dP,var_dP,rho,V_ell,"
           "cost_online_units,cost_offline_units\n";
    for (const LevelReport& row : result.levels) {
        out << row.level << ',' << row.n << ',' << row.shifts << ','
            << format_double(row.mean_P) << ',' << format_double(row.var_P)
            << ',' << format_double(row.mean_dP) << ','
            << format_double(row.var_dP) << ',' << format_double(row.rho)
            << ',' << format_double(row.V) << ','
            << format_double(row.cost_online_units) << ','
            << format_double(row.cost_offline_units) << '\n';
    }
    return out.str();
}

std::string tolerances_csv(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "epsilon,approach,total_units,total_seconds,"
           "achieved_error_estimate\n";
    for (const RunRecord& r : records) {
        out << format_double(r.eps) << ',' << r.approach << ','
            << format_double(r.result.total_units) << ','
            << format_double(r.result.wall_seconds) << ','
            << format_double(r.result.achieved_error) << '\n';
    }
    return out.str();
}

std::string report_json_text(const std::string& config_text,
                             const std::vector<RunRecord>& records) {
    json doc;
    doc["config"] = config_text;
    doc["runs"] = json::array();
    for (const RunRecord& r : records) {
        json run;
        run["approach"] = r.approach;
        run["eps"] = num(r.eps);
        run["tolerance_met"] = r.result.tolerance_met;
        run["estimate"] = num(r.result.estimate);
        run["stat_error"] = num(r.result.stat_error);
        run["bias_estimate"] = num(r.result.bias_estimate);
        run["achieved_error"] = num(r.result.achieved_error);
        run["telescoping"] = {{"residual", num(r.result.telescoping_residual)},
                              {"se", num(r.result.telescoping_se)}};
        run["totals"] = {{"online_units", num(r.result.total_online_units)},
                         {"offline_units", num(r.result.total_offline_units)},
                         {"units", num(r.result.total_units)}};
        run["levels"] = json::array();
        for (const LevelReport& row : r.result.levels)
            run["levels"].push_back(level_json(row));
        // Timing sits in its own subtree so byte-level comparisons of two
        // reports can drop the only machine-dependent part.
        run["wall_clock"] = {{"seconds", num(r.result.wall_seconds)}};
        doc["runs"].push_back(std::move(run));
    }
    return doc.dump(2) + "\n";
}

void write_report_files(const std::string& out_dir,
                        const std::string& config_text,
                        const std::vector<RunRecord>& records) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        fail(ErrorKind::io, "cannot create " + out_dir + ": " + ec.message());

    // Tolerance index by order of first appearance; the run loop emits
    // records tolerance-major, so this matches the configured eps order.
    std::vector<double> eps_seen;
    auto eps_index = [&](double e) {
        for (std::size_t i = 0; i < eps_seen.size(); ++i)
            if (eps_seen[i] == e) return i;
        eps_seen.push_back(e);
        return eps_seen.size() - 1;
    };

    for (const RunRecord& r : records) {
        const std::string name = "levels_" + r.approach + "_eps" +
                                 std::to_string(eps_index(r.eps)) + ".csv";
        write_text_file((fs::path(out_dir) / name).string(),
                        levels_csv(r.result));
    }
    if (records.size() == 1)
        write_text_file((fs::path(out_dir) / "levels.csv").string(),
                        levels_csv(records.front().result));
    write_text_file((fs::path(out_dir) / "tolerances.csv").string(),
                    tolerances_csv(records));
    write_text_file((fs::path(out_dir) / "report.json").string(),
                    report_json_text(config_text, records));
}

} // namespace mlqmc

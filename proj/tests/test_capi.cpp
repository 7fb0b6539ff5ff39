#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "mlqmc/mlqmc.h"

namespace fs = std::filesystem;

namespace {

// The whole suite talks to the engine the way any C client would: through
// the opaque session handle and status codes only.
struct Session {
    mlqmc_session* h = mlqmc_session_create();
    ~Session() { mlqmc_session_destroy(h); }
};

const char* kRunConfig =
    "approach=lna\n"
    "eps=1e9\n"
    "max_level=1\n"
    "initial_n=4,4\n"
    "shifts=2\n"
    "s=20\n"
    "seed=3\n"
    "matern_nu=0.5\n"
    "gaussian_mean=0.05\n";

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("version and status names are stable") {
    CHECK(std::strcmp(mlqmc_version(), "1.0.0") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_OK), "ok") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_INPUT), "input") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_PARSE), "parse") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_CONFIG), "config") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_NUMERIC), "numeric") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_IO), "io") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_VALIDATION), "validation") == 0);
    CHECK(std::strcmp(mlqmc_status_name(MLQMC_E_UNKNOWN), "unknown") == 0);
}

TEST_CASE("null handles and arguments are rejected without crashing") {
    CHECK(mlqmc_load_config_text(nullptr, "x") == MLQMC_E_INPUT);
    CHECK(mlqmc_run(nullptr, nullptr) == MLQMC_E_INPUT);
    CHECK(mlqmc_summary_json(nullptr) == nullptr);
    CHECK(mlqmc_tolerance_met(nullptr) == -1);
    CHECK(std::strcmp(mlqmc_last_error(nullptr), "null session") == 0);
    mlqmc_session_destroy(nullptr);

    Session s;
    REQUIRE(s.h != nullptr);
    CHECK(mlqmc_load_config_text(s.h, nullptr) == MLQMC_E_INPUT);
    CHECK(mlqmc_set_option(s.h, nullptr, "1") == MLQMC_E_INPUT);
    CHECK(mlqmc_set_option(s.h, "eps", nullptr) == MLQMC_E_INPUT);
    CHECK(mlqmc_rules_dump(s.h, 0, nullptr) == MLQMC_E_INPUT);
    CHECK(mlqmc_cbc(s.h, 16, 2, nullptr) == MLQMC_E_INPUT);
    CHECK(std::strlen(mlqmc_last_error(s.h)) > 0);
}

TEST_CASE("configuration loading distinguishes parse and config trouble") {
    Session s;
    CHECK(mlqmc_load_config_text(s.h, kRunConfig) == MLQMC_OK);
    CHECK(std::strlen(mlqmc_last_error(s.h)) == 0);

    CHECK(mlqmc_load_config_text(s.h, "no equals sign here\n") == MLQMC_E_PARSE);
    CHECK(mlqmc_load_config_text(s.h, "gaussian_mean=1\nbogus=2\n") ==
          MLQMC_E_CONFIG);
    CHECK(mlqmc_load_config_text(s.h, "seed=1\n") == MLQMC_E_CONFIG);
    CHECK(mlqmc_load_config_file(s.h, "/nonexistent/config.cfg") == MLQMC_E_IO);

    CHECK(mlqmc_load_config_text(s.h, kRunConfig) == MLQMC_OK);
    CHECK(mlqmc_set_option(s.h, "eps", "0.5") == MLQMC_OK);
    CHECK(mlqmc_set_option(s.h, "voodoo", "1") == MLQMC_E_CONFIG);
    CHECK(std::strstr(mlqmc_last_error(s.h), "voodoo") != nullptr);
}

TEST_CASE("rule and lattice exports write loadable files") {
    Session s;
    const fs::path dir = fresh_dir("mlqmc_capi_exports");
    fs::create_directories(dir);

    const fs::path rules = dir / "rules.csv";
    CHECK(mlqmc_rules_dump(s.h, 2, rules.string().c_str()) == MLQMC_OK);
    const std::string rtext = slurp(rules);
    CHECK(rtext.rfind("level,index,u,v,weight", 0) == 0);
    CHECK(mlqmc_rules_dump(s.h, 7, rules.string().c_str()) == MLQMC_E_INPUT);
    CHECK(mlqmc_rules_dump(s.h, -1, rules.string().c_str()) == MLQMC_E_INPUT);

    const fs::path gv = dir / "genvec.txt";
    CHECK(mlqmc_cbc(s.h, 16, 3, gv.string().c_str()) == MLQMC_OK);
    std::ifstream in(gv);
    std::uint64_t v;
    int count = 0;
    while (in >> v) ++count;
    CHECK(count == 3);
    CHECK(mlqmc_cbc(s.h, 6, 3, gv.string().c_str()) == MLQMC_E_CONFIG);
}

TEST_CASE("field validation reports deviations in standard errors") {
    Session s;
    REQUIRE(mlqmc_load_config_text(s.h, kRunConfig) == MLQMC_OK);
    const fs::path dir = fresh_dir("mlqmc_capi_field");

    double max_se = -1.0;
    CHECK(mlqmc_field_validate(s.h, 6, 1, 1, dir.string().c_str(), &max_se) ==
          MLQMC_OK);
    CHECK(max_se == 0.0);

    max_se = -1.0;
    CHECK(mlqmc_field_validate(s.h, 6, 500, 0, dir.string().c_str(), &max_se) ==
          MLQMC_OK);
    CHECK(max_se > 0.0);
    CHECK(max_se <= 4.0);
    CHECK(fs::exists(dir / "spectrum.csv"));

    CHECK(mlqmc_field_validate(s.h, 0, 1, 0, dir.string().c_str(), nullptr) ==
          MLQMC_E_INPUT);
}

TEST_CASE("a full run writes the report set and the summary") {
    Session s;

    // no tolerance configured yet
    CHECK(mlqmc_run(s.h, nullptr) == MLQMC_E_CONFIG);
    CHECK(mlqmc_summary_json(s.h) == nullptr);
    CHECK(mlqmc_tolerance_met(s.h) == -1);

    REQUIRE(mlqmc_load_config_text(s.h, kRunConfig) == MLQMC_OK);
    const fs::path dir = fresh_dir("mlqmc_capi_run");
    REQUIRE(mlqmc_run(s.h, dir.string().c_str()) == MLQMC_OK);

    CHECK(mlqmc_tolerance_met(s.h) == 1);
    CHECK(fs::exists(dir / "levels_lna_eps0.csv"));
    CHECK(fs::exists(dir / "levels.csv"));
    CHECK(fs::exists(dir / "tolerances.csv"));
    CHECK(fs::exists(dir / "report.json"));

    const char* summary = mlqmc_summary_json(s.h);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary) == slurp(dir / "report.json"));

    const nlohmann::json doc = nlohmann::json::parse(summary);
    REQUIRE(doc.at("runs").size() == 1);
    const auto& run = doc.at("runs").at(0);
    CHECK(run.at("approach") == "lna");
    CHECK(run.at("tolerance_met") == true);
    CHECK(run.at("levels").size() == 2);
    CHECK(run.at("levels").at(1).at("n") == 4);
    const std::string echo = doc.at("config");
    CHECK(echo.find("approach=lna") != std::string::npos);

    const std::string levels = slurp(dir / "levels.csv");
    CHECK(levels.rfind("level,N,R,", 0) == 0);
    const std::string tol = slurp(dir / "tolerances.csv");
    CHECK(tol.rfind("epsilon,approach,total_units,total_seconds,", 0) == 0);

    const fs::path hdir = fresh_dir("mlqmc_capi_hier");
    CHECK(mlqmc_hierarchy(s.h, hdir.string().c_str()) == MLQMC_OK);
    CHECK(fs::exists(hdir / "hierarchy_lna.csv"));
    const std::string plan = slurp(hdir / "hierarchy_lna.csv");
    CHECK(plan.rfind("approach,level,role,index,u,v,fine_index", 0) == 0);
}

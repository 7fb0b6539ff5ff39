#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "config.hpp"
#include "util.hpp"

#include "oracle_pins.inc"

using namespace mlqmc;

namespace {

// every config must choose a field parameterization; most tests use the
// default lognormal moments and only vary the keys under test
const char* kFieldBlock = "lognormal_mean=8020\nlognormal_stddev=400\n";

Config parse_with_block(const std::string& extra) {
    return parse_config_text(std::string(kFieldBlock) + extra);
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

} // namespace

TEST_CASE("a minimal config carries the documented defaults") {
    const Config c = parse_with_block("");
    CHECK(c.mesh == "builtin");
    CHECK(c.approach == "all");
    CHECK(c.eps.empty());
    CHECK(c.max_level == 6);
    REQUIRE(c.initial_n.size() == 3);
    CHECK(c.initial_n[0] == 8);
    CHECK(c.shifts == 10);
    CHECK(c.growth_factor == 2.0);
    CHECK(c.seed == 1);
    CHECK(c.s == 400);
    CHECK(c.threads == 0);
    CHECK(c.out == "out");
    CHECK(c.has_lognormal_block);
    CHECK(!c.has_gaussian_block);
    CHECK(c.lognormal_mean == 8020.0);
    CHECK(c.lognormal_stddev == 400.0);
    CHECK(c.matern_nu == 2.0);
    CHECK(c.matern_lambda == 0.3);
    CHECK(c.young == 30e6);
    CHECK(c.poisson == 0.25);
    CHECK(c.density == 1330.0);
    CHECK(c.gravity == 9.81);
}

TEST_CASE("values, lists and comments parse") {
    const Config c = parse_config_text("# run setup\n"
                                       "approach = lna\n"
                                       "eps = 0.02, 0.01,0.005\n"
                                       "initial_n = 32,16, 8\n"
                                       "max_level=4\n"
                                       "seed = 77\n"
                                       "\n"
                                       "lognormal_mean = 9000\n"
                                       "lognormal_stddev = 350 # comment\n");
    CHECK(c.approach == "lna");
    REQUIRE(c.eps.size() == 3);
    CHECK(c.eps[0] == 0.02);
    CHECK(c.eps[1] == 0.01);
    CHECK(c.eps[2] == 0.005);
    REQUIRE(c.initial_n.size() == 3);
    CHECK(c.initial_n[0] == 32);
    CHECK(c.initial_n[2] == 8);
    CHECK(c.max_level == 4);
    CHECK(c.seed == 77);
    CHECK(c.lognormal_mean == 9000.0);
    CHECK(c.lognormal_stddev == 350.0);
}

TEST_CASE("unknown, repeated and malformed keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_with_block("epsilon=0.1\n"),
                         doctest::Contains("epsilon"), Error);
    CHECK_THROWS_AS(parse_with_block("seed=1\nseed=2\n"), Error);
    CHECK_THROWS_AS(parse_with_block("seed=minus one\n"), Error);
    CHECK_THROWS_AS(parse_with_block("eps=0\n"), Error);
    CHECK_THROWS_AS(parse_with_block("eps=-0.5\n"), Error);
    CHECK_THROWS_AS(parse_with_block("growth_factor=1.0\n"), Error);
    CHECK_THROWS_AS(parse_with_block("shifts=1\n"), Error);
    CHECK_THROWS_AS(parse_with_block("max_level=7\n"), Error);
    CHECK_THROWS_AS(parse_with_block("this is not a key value line\n"), Error);
}

TEST_CASE("parse errors cite the line number") {
    try {
        parse_config_text("seed=1\nbogus_key=3\n");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("the two field blocks are mutually exclusive and atomic") {
    CHECK_NOTHROW(parse_config_text("lognormal_mean=8020\nlognormal_stddev=400\n"));
    CHECK_NOTHROW(parse_config_text("gaussian_mean=9\n"));
    CHECK_THROWS_AS(parse_config_text("lognormal_mean=8020\nlognormal_stddev=400\n"
                                      "gaussian_mean=9\n"),
                    Error);
    CHECK_THROWS_AS(parse_config_text("lognormal_mean=8020\n"), Error);
    CHECK_THROWS_AS(parse_config_text("lognormal_stddev=400\n"), Error);
    CHECK_THROWS_AS(parse_config_text("seed=3\n"), Error); // no block at all

    const Config g = parse_config_text("gaussian_mean=9.5\n");
    CHECK(g.has_gaussian_block);
    CHECK(!g.has_lognormal_block);
    CHECK(g.gaussian_mean == 9.5);
}

TEST_CASE("echoed configs reparse to the identical echo") {
    const Config c = parse_with_block("approach=gna\neps=0.03,0.0071\nseed=123\n"
                                      "matern_lambda=0.45\ns=37\n");
    const std::string echo = echo_config(c);
    const Config back = parse_config_text(echo);
    CHECK(echo_config(back) == echo);

    const Config d = parse_config_text("gaussian_mean=1.25\nmatern_sigma2=0.6\n");
    const std::string echo_d = echo_config(d);
    CHECK(echo_config(parse_config_text(echo_d)) == echo_d);
    CHECK(echo_d.find("gaussian_mean") != std::string::npos);
    CHECK(echo_d.find("lognormal_mean") == std::string::npos);
}

TEST_CASE("cli overrides apply on top of a parsed file") {
    Config c = parse_with_block("eps=0.1\nseed=5\n");
    apply_option(c, "eps", "0.05,0.02");
    apply_option(c, "approach", "nna");
    apply_option(c, "threads", "2");
    REQUIRE(c.eps.size() == 2);
    CHECK(c.eps[1] == 0.02);
    CHECK(c.approach == "nna");
    CHECK(c.threads == 2);
    CHECK_THROWS_AS(apply_option(c, "voodoo", "1"), Error);

    // switching the field parameterization through an override
    apply_option(c, "gaussian_mean", "2.5");
    CHECK(c.has_gaussian_block);
    CHECK(!c.has_lognormal_block);
    const std::string echo = echo_config(c);
    CHECK(echo.find("gaussian_mean") != std::string::npos);
    CHECK(echo.find("lognormal_mean") == std::string::npos);
}

TEST_CASE("config files load from disk with existence checks") {
    const auto path = temp_file("mlqmc_config_ok.cfg",
                                std::string(kFieldBlock) + "seed=9\neps=0.5\n");
    const Config c = load_config_file(path.string());
    CHECK(c.seed == 9);
    CHECK_THROWS_AS(load_config_file("/nonexistent/path.cfg"), Error);
    CHECK_THROWS_AS(parse_with_block("mesh=/nonexistent/mesh.txt\n"), Error);
    CHECK_THROWS_AS(parse_with_block("genvec=/nonexistent/genvec.txt\n"), Error);
}

TEST_CASE("derived material matches the config and is validated") {
    const Config c =
        parse_with_block("young=2.1e7\npoisson=0.2\ndensity=1500\ngravity=9.8\n");
    const Material m = material_of(c);
    CHECK(m.young == 2.1e7);
    CHECK(m.poisson == 0.2);
    CHECK(m.density == 1500.0);
    CHECK(m.gravity == 9.8);

    CHECK_THROWS_AS(material_of(parse_with_block("young=0\n")), Error);
    CHECK_THROWS_AS(material_of(parse_with_block("poisson=0.5\n")), Error);
    CHECK_THROWS_AS(material_of(parse_with_block("density=-3\n")), Error);
}

TEST_CASE("the lognormal block moment matches the gaussian field") {
    const Config c = parse_with_block("");
    const FieldModel f = field_model_of(c);
    CHECK(f.mean == doctest::Approx(kLognormalZbarPin).epsilon(1e-15));
    CHECK(f.kernel.sigma2 == doctest::Approx(kLognormalSigma2Pin).epsilon(1e-15));
    CHECK(f.kernel.nu == 2.0);
    CHECK(f.kernel.lambda == 0.3);
    CHECK(f.s == 400);
}

TEST_CASE("the gaussian block passes its parameters straight through") {
    const Config c = parse_config_text("gaussian_mean=1.5\ns=25\n");
    const FieldModel f = field_model_of(c);
    CHECK(f.mean == 1.5);
    CHECK(f.kernel.sigma2 == 1.0); // default variance
    CHECK(f.s == 25);

    const Config d = parse_config_text("gaussian_mean=1.5\nmatern_sigma2=0.3\n");
    CHECK(field_model_of(d).kernel.sigma2 == 0.3);

    // an explicit kernel variance also overrides the moment matched one
    const Config e = parse_with_block("matern_sigma2=0.7\n");
    CHECK(field_model_of(e).kernel.sigma2 == 0.7);
}

TEST_CASE("approach lists expand in a fixed order") {
    const auto a = approaches_of(parse_with_block(""));
    REQUIRE(a.size() == 3);
    CHECK(a[0] == Approach::nna);
    CHECK(a[1] == Approach::gna);
    CHECK(a[2] == Approach::lna);

    const auto b = approaches_of(parse_with_block("approach=lna\n"));
    REQUIRE(b.size() == 1);
    CHECK(b[0] == Approach::lna);
}

TEST_CASE("estimator settings copy from the config") {
    const Config c = parse_with_block("max_level=3\ninitial_n=12,6\nshifts=4\n"
                                      "growth_factor=1.5\nthreads=2\n");
    const EstimatorConfig e = estimator_config_of(c, 0.125);
    CHECK(e.eps == 0.125);
    CHECK(e.max_level == 3);
    REQUIRE(e.initial_n.size() == 2);
    CHECK(e.initial_n[0] == 12);
    CHECK(e.initial_n[1] == 6);
    CHECK(e.shifts == 4);
    CHECK(e.growth_factor == 1.5);
    CHECK(e.threads == 2);
}

TEST_CASE("meshes resolve from the builtin fixture or a file") {
    const Mesh m = mesh_of(parse_with_block(""));
    CHECK(m.nodes.size() == builtin_slope_mesh().nodes.size());

    const auto path = temp_file("mlqmc_tiny_mesh.txt",
                                "3 1 2\n0 0\n1 0\n0 1\n0 1 2\n0 1\n2\n");
    Config f = parse_with_block("");
    f.mesh = path.string();
    const Mesh loaded = mesh_of(f);
    CHECK(loaded.nodes.size() == 3);
    CHECK(loaded.triangles.size() == 1);
    CHECK(loaded.qoi_node_id == 2);
}

TEST_CASE("generating vectors resolve from the embedded table or a file") {
    CHECK(genvec_of(parse_with_block("")).size() == 400);

    const auto path = temp_file("mlqmc_genvec.txt", "5\n9\n11\n");
    Config f = parse_with_block("");
    f.genvec = path.string();
    const auto z = genvec_of(f);
    REQUIRE(z.size() == 3);
    CHECK(z[2] == 11);
}

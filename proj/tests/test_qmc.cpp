#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "qmc.hpp"
#include "util.hpp"

#include "oracle_pins.inc"

using namespace mlqmc;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

// shift-averaged worst-case error in the weighted Korobov space, written
// out directly from its definition
double korobov_error(const std::vector<std::uint64_t>& z, std::uint64_t n) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double x =
                static_cast<double>((k * z[j]) % n) / static_cast<double>(n);
            const double bernoulli = x * x - x + 1.0 / 6.0;
            const double weight = 1.0 / double((j + 1) * (j + 1));
            prod *= 1.0 + weight * 2.0 * 3.14159265358979323846 *
                              3.14159265358979323846 * bernoulli;
        }
        sum += prod;
    }
    return sum / static_cast<double>(n) - 1.0;
}

} // namespace

TEST_CASE("bit reversal maps small indices to their van der Corput values") {
    CHECK(radical_inverse_base2(0) == 0.0);
    CHECK(radical_inverse_base2(1) == 0.5);
    CHECK(radical_inverse_base2(2) == 0.25);
    CHECK(radical_inverse_base2(3) == 0.75);
    CHECK(radical_inverse_base2(6) == 0.375);
}

TEST_CASE("bit reversal enumerates every dyadic fraction once") {
    std::vector<double> got;
    for (std::uint64_t n = 0; n < 16; ++n)
        got.push_back(radical_inverse_base2(n));
    std::sort(got.begin(), got.end());
    for (int k = 0; k < 16; ++k)
        CHECK(got[k] == static_cast<double>(k) / 16.0);
}

TEST_CASE("inverse normal cdf hits the reference grid") {
    for (const auto& pin : kNormalInvGrid) {
        const double p = static_cast<double>(pin.k) / 1024.0;
        const double got = inverse_normal_cdf(p);
        const double tol = std::max(1e-9 * std::fabs(pin.x), 1e-15);
        CAPTURE(pin.k);
        CHECK(std::fabs(got - pin.x) <= tol);
    }
    for (const auto& spot : kNormalInvSpots) {
        const double got = inverse_normal_cdf(spot[0]);
        CHECK(std::fabs(got - spot[1]) <= 1e-9 * std::fabs(spot[1]) + 1e-15);
    }
}

TEST_CASE("inverse normal cdf is monotone and rejects bad input") {
    double last = -1e30;
    for (const auto& pin : kNormalInvGrid) {
        const double x = inverse_normal_cdf(static_cast<double>(pin.k) / 1024.0);
        CHECK(x > last);
        last = x;
    }
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), Error);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), Error);
    CHECK_THROWS_AS(inverse_normal_cdf(-0.25), Error);
}

TEST_CASE("counter keyed normal draws are pure functions of their key") {
    const double a = standard_normal(7, 3, 11);
    CHECK(a == standard_normal(7, 3, 11));
    CHECK(a != standard_normal(7, 3, 12));
    CHECK(a == inverse_normal_cdf(uniform01(counter_hash(7, 3, 11))));
}

TEST_CASE("shifted lattice points follow the worked example") {
    LatticeRule rule;
    rule.z = {1, 3};
    rule.s = 2;
    rule.shifts = {{0.35, 0.95}};

    const auto p0 = lattice_point(rule, 0, 0);
    CHECK(p0.unit[0] == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(p0.unit[1] == doctest::Approx(0.95).epsilon(1e-15));

    const auto p1 = lattice_point(rule, 0, 1);
    CHECK(p1.unit[0] == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(p1.unit[1] == doctest::Approx(0.45).epsilon(1e-15));

    const auto p6 = lattice_point(rule, 0, 6);
    CHECK(p6.unit[0] == doctest::Approx(0.725).epsilon(1e-14));
    CHECK(p6.unit[1] == doctest::Approx(0.075).epsilon(1e-13));

    for (const auto& p : {p0, p1, p6})
        for (int j = 0; j < 2; ++j)
            CHECK(p.gauss[j] == inverse_normal_cdf(p.unit[j]));

    CHECK_THROWS_AS(lattice_point(rule, 1, 0), Error);
    CHECK_THROWS_AS(lattice_point(rule, -1, 0), Error);
}

TEST_CASE("without a shift each coordinate sweeps k over N") {
    LatticeRule rule;
    rule.z = {1, 5};
    rule.s = 2;
    rule.shifts = {{0.0, 0.0}};
    const std::uint64_t n = 8;
    for (int j = 0; j < 2; ++j) {
        std::vector<double> seen;
        for (std::uint64_t k = 0; k < n; ++k)
            seen.push_back(lattice_point(rule, 0, k).unit[j]);
        std::sort(seen.begin(), seen.end());
        for (std::uint64_t k = 0; k < n; ++k) {
            const double want = static_cast<double>(k) / static_cast<double>(n);
            CHECK(std::fabs(seen[k] - want) <= 2e-16);
        }
    }
}

TEST_CASE("unit coordinates stay strictly inside the open interval") {
    LatticeRule rule;
    rule.z = {1};
    rule.s = 1;
    rule.shifts = {{0.0}};
    const double lo = 0x1p-53;
    const double hi = 1.0 - 0x1p-53;
    CHECK(lattice_point(rule, 0, 0).unit[0] == lo);
    for (std::uint64_t k = 0; k < 64; ++k) {
        const double u = lattice_point(rule, 0, k).unit[0];
        CHECK(u >= lo);
        CHECK(u <= hi);
        CHECK(std::isfinite(lattice_point(rule, 0, k).gauss[0]));
    }
}

TEST_CASE("generated rules are reproducible functions of seed and level") {
    const auto& z = default_generating_vector();
    const auto a = make_lattice_rule(z, 12, 4, 99, 2);
    const auto b = make_lattice_rule(z, 12, 4, 99, 2);
    const auto c = make_lattice_rule(z, 12, 4, 99, 3);
    CHECK(a.s == 12);
    CHECK(a.z.size() == 12);
    REQUIRE(a.shifts.size() == 4);
    bool differs = false;
    for (int r = 0; r < 4; ++r)
        for (int j = 0; j < 12; ++j) {
            CHECK(a.shifts[r][j] == b.shifts[r][j]);
            CHECK(a.shifts[r][j] > 0.0);
            CHECK(a.shifts[r][j] < 1.0);
            if (a.shifts[r][j] != c.shifts[r][j])
                differs = true;
        }
    CHECK(differs);
    CHECK_THROWS_AS(make_lattice_rule(z, 401, 4, 99, 0), Error);
    CHECK_THROWS_AS(make_lattice_rule(z, 0, 4, 99, 0), Error);
}

TEST_CASE("construction reproduces the error criterion it minimizes") {
    const std::vector<std::uint64_t> z = {1, 3};
    CHECK(cbc_criterion(z, 8) ==
          doctest::Approx(korobov_error(z, 8)).epsilon(1e-12));
}

TEST_CASE("construction is greedy optimal dimension by dimension") {
    const std::uint64_t n = 8;
    const auto z = cbc_construct(n, 3);
    REQUIRE(z.size() == 3);
    for (const auto zi : z) {
        CHECK(zi % 2 == 1);
        CHECK(zi < n);
    }
    for (std::size_t dim = 1; dim <= z.size(); ++dim) {
        std::vector<std::uint64_t> prefix(z.begin(), z.begin() + dim);
        const double chosen = cbc_criterion(prefix, n);
        for (std::uint64_t c = 1; c < n; c += 2) {
            prefix[dim - 1] = c;
            const double other = cbc_criterion(prefix, n);
            CAPTURE(dim);
            CAPTURE(c);
            CHECK(other >= chosen - 1e-12 * std::fabs(chosen));
        }
    }
}

TEST_CASE("construction extends prefixes instead of reshuffling them") {
    const auto two = cbc_construct(16, 2);
    const auto four = cbc_construct(16, 4);
    REQUIRE(four.size() == 4);
    CHECK(two[0] == four[0]);
    CHECK(two[1] == four[1]);
}

TEST_CASE("construction rejects unusable sizes") {
    CHECK_THROWS_AS(cbc_construct(6, 2), Error);
    CHECK_THROWS_AS(cbc_construct(1, 2), Error);
    CHECK_THROWS_AS(cbc_construct(8, 0), Error);
    CHECK_NOTHROW(cbc_construct(13, 2));
}

TEST_CASE("embedded generating vector matches its construction record") {
    const auto& z = default_generating_vector();
    REQUIRE(z.size() == 400);
    for (const auto zi : z) {
        CHECK(zi % 2 == 1);
        CHECK(zi < 8192);
    }
    CHECK(z[0] == 3315);
    CHECK(z[1] == 3725);
}

TEST_CASE("generating vectors load from plain integer files") {
    const auto good = temp_file("genvec_good.txt", "3\n17\n91\n");
    const auto z = load_generating_vector(good.string());
    REQUIRE(z.size() == 3);
    CHECK(z[0] == 3);
    CHECK(z[1] == 17);
    CHECK(z[2] == 91);

    const auto junk = temp_file("genvec_junk.txt", "3\nseventeen\n");
    CHECK_THROWS_AS(load_generating_vector(junk.string()), Error);
    const auto empty = temp_file("genvec_empty.txt", "");
    CHECK_THROWS_AS(load_generating_vector(empty.string()), Error);
    CHECK_THROWS_AS(load_generating_vector("/nonexistent/genvec.txt"), Error);
}

TEST_CASE("shift dump lists one row per shift component") {
    const auto rule = make_lattice_rule(default_generating_vector(), 3, 2, 5, 0);
    std::ostringstream os;
    dump_shifts_csv(os, rule);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "r,j,xi");
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == 6);
}

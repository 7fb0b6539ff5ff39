#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "reference_rules.hpp"
#include "util.hpp"

using namespace mlqmc;

namespace {

// Exact integral of u^a v^b over the reference triangle, a! b! / (a+b+2)!,
// computed as a product of factors <= 1 so nothing overflows or cancels.
double exact_monomial(int a, int b) {
    double value = 1.0;
    for (int k = 1; k <= b; ++k)
        value *= static_cast<double>(k) / static_cast<double>(a + k);
    value /= static_cast<double>(a + b + 1) * static_cast<double>(a + b + 2);
    return value;
}

} // namespace

TEST_CASE("rule sizes follow the level table") {
    const std::vector<int> expected = {16, 19, 28, 37, 61, 73, 126};
    const auto& table = level_table();
    REQUIRE(table.size() == expected.size());
    for (int l = 0; l <= kMaxLevel; ++l) {
        CHECK(table[l].level == l);
        CHECK(table[l].order == l + 2);
        CHECK(table[l].npoints == expected[l]);
        CHECK(rule_for_level(l).npoints() == expected[l]);
        CHECK(rule_for_level(l).level == l);
    }
    for (size_t l = 1; l < expected.size(); ++l)
        CHECK(expected[l] > expected[l - 1]);
}

TEST_CASE("every rule integrates monomials exactly up to its degree") {
    for (int l = 0; l <= kMaxLevel; ++l) {
        const auto& rule = rule_for_level(l);
        CAPTURE(l);
        CHECK(rule.nominal_degree >= 2 * (l + 2));
        for (int a = 0; a + 0 <= rule.nominal_degree; ++a) {
            for (int b = 0; a + b <= rule.nominal_degree; ++b) {
                const double exact = exact_monomial(a, b);
                const double got = integrate_monomial(rule, a, b);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(std::fabs(got - exact) <= 1e-12 * exact);
            }
        }
    }
}

TEST_CASE("spot values of low monomials") {
    const auto& rule = rule_for_level(0);
    CHECK(integrate_monomial(rule, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate_monomial(rule, 1, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    // 4! 4! / 10! = 1/6300
    CHECK(integrate_monomial(rule, 4, 4) ==
          doctest::Approx(1.0 / 6300.0).epsilon(1e-13));
}

TEST_CASE("weights are positive, sum to one half, points interior and distinct") {
    for (int l = 0; l <= kMaxLevel; ++l) {
        const auto& rule = rule_for_level(l);
        CAPTURE(l);
        double wsum = 0.0;
        for (const auto& p : rule.points) {
            CHECK(p.w > 0.0);
            CHECK(p.u > 0.0);
            CHECK(p.v > 0.0);
            CHECK(p.u + p.v < 1.0);
            wsum += p.w;
        }
        CHECK(std::fabs(wsum - 0.5) <= 1e-14);
        for (size_t i = 0; i < rule.points.size(); ++i) {
            for (size_t j = i + 1; j < rule.points.size(); ++j) {
                const double du = rule.points[i].u - rule.points[j].u;
                const double dv = rule.points[i].v - rule.points[j].v;
                CHECK(du * du + dv * dv > 1e-12);
            }
        }
    }
}

TEST_CASE("point sets carry the full triangle symmetry") {
    for (int l = 0; l <= kMaxLevel; ++l) {
        const auto& rule = rule_for_level(l);
        CAPTURE(l);
        // each point's mirror image (u,v) -> (v,u) must appear with the
        // same weight; same for the rotation (u,v) -> (v, 1-u-v)
        for (const auto& p : rule.points) {
            auto find = [&](double u, double v) {
                for (const auto& q : rule.points)
                    if (std::fabs(q.u - u) < 1e-12 && std::fabs(q.v - v) < 1e-12)
                        return q.w;
                return -1.0;
            };
            const double wm = find(p.v, p.u);
            const double wr = find(p.v, 1.0 - p.u - p.v);
            CHECK(wm == doctest::Approx(p.w).epsilon(1e-12));
            CHECK(wr == doctest::Approx(p.w).epsilon(1e-12));
        }
    }
}

TEST_CASE("built-in validation accepts every shipped rule") {
    for (int l = 0; l <= kMaxLevel; ++l)
        CHECK_NOTHROW(validate_rule(rule_for_level(l)));
}

TEST_CASE("rules are immutable singletons") {
    CHECK(&rule_for_level(3) == &rule_for_level(3));
    const auto& a = rule_for_level(2);
    const auto& b = rule_for_level(2);
    REQUIRE(a.points.size() == b.points.size());
    for (size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].u == b.points[i].u);
        CHECK(a.points[i].v == b.points[i].v);
        CHECK(a.points[i].w == b.points[i].w);
    }
}

TEST_CASE("out of range levels are rejected") {
    CHECK_THROWS_AS(rule_for_level(-1), Error);
    CHECK_THROWS_AS(rule_for_level(kMaxLevel + 1), Error);
}

TEST_CASE("csv dump lists every point under the documented header") {
    std::ostringstream os;
    dump_rules_csv(os, 2);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "level,index,u,v,weight");
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == 16 + 19 + 28);
}

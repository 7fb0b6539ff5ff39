#include "reference_rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "util.hpp"

namespace mlqmc {

namespace {

struct RuleData {
    int npoints;
    int degree;
    const RefPoint* points;
};

#include "quadrature_tables.inc"

constexpr int kNumRules = static_cast<int>(sizeof(kRules) / sizeof(kRules[0]));

// Exact integral of u^p v^q over the reference triangle: p! q! / (p+q+2)!.
double monomial_integral(int p, int q) {
    double value = 1.0;
    for (int k = 1; k <= q; ++k)
        value *= static_cast<double>(k) / static_cast<double>(p + k);
    value /= static_cast<double>(p + q + 1) * static_cast<double>(p + q + 2);
    return value;
}

} // namespace

const std::vector<LevelSpec>& level_table() {
    static const std::vector<LevelSpec> table = [] {
        std::vector<LevelSpec> t;
        for (int l = 0; l <= kMaxLevel; ++l)
            t.push_back({l, l + 2, kRules[l].npoints});
        return t;
    }();
    return table;
}

const QuadratureRule& rule_for_level(int level) {
    if (level < 0 || level > kMaxLevel)
        fail(ErrorKind::input,
             "quadrature level out of range: " + std::to_string(level));
    static const std::vector<QuadratureRule> rules = [] {
        std::vector<QuadratureRule> r;
        for (int l = 0; l < kNumRules; ++l) {
            QuadratureRule q;
            q.level = l;
            q.nominal_degree = kRules[l].degree;
            q.points.assign(kRules[l].points, kRules[l].points + kRules[l].npoints);
            r.push_back(std::move(q));
        }
        return r;
    }();
    return rules[level];
}

double integrate_monomial(const QuadratureRule& rule, int p, int q) {
    if (p < 0 || q < 0)
        fail(ErrorKind::input, "monomial exponents must be non-negative");
    double sum = 0.0;
    for (const RefPoint& pt : rule.points)
        sum += pt.w * std::pow(pt.u, p) * std::pow(pt.v, q);
    return sum;
}

void validate_rule(const QuadratureRule& rule) {
    const auto& pts = rule.points;
    if (pts.empty())
        fail(ErrorKind::input, "empty quadrature rule");
    double wsum = 0.0;
    for (const RefPoint& p : pts) {
        if (!(p.w > 0.0))
            fail(ErrorKind::input, "non-positive quadrature weight");
        if (!(p.u > 0.0 && p.v > 0.0 && p.u + p.v < 1.0))
            fail(ErrorKind::input, "quadrature point outside open triangle");
        wsum += p.w;
    }
    if (std::abs(wsum - 0.5) > 1e-14)
        fail(ErrorKind::input, "quadrature weights do not sum to 1/2");

    // S3 symmetry: the multiset of (l1,l2,l3,w) must be permutation closed.
    auto key = [](double a, double b, double w) {
        std::array<double, 3> lam{1.0 - a - b, a, b};
        std::sort(lam.begin(), lam.end());
        return std::array<double, 4>{lam[0], lam[1], lam[2], w};
    };
    std::vector<std::array<double, 4>> orig, perm;
    for (const RefPoint& p : pts) {
        orig.push_back(key(p.u, p.v, p.w));
        // swap two barycentric coordinates: image point must be present
        perm.push_back(key(p.v, p.u, p.w));
    }
    std::sort(orig.begin(), orig.end());
    std::sort(perm.begin(), perm.end());
    if (orig != perm)
        fail(ErrorKind::input, "quadrature rule is not S3 symmetric");
    // group points by sorted barycentric key and check full orbit sizes
    for (size_t i = 0; i < orig.size();) {
        size_t j = i;
        while (j < orig.size() && orig[j] == orig[i]) ++j;
        size_t n = j - i;
        if (n != 1 && n != 3 && n != 6)
            fail(ErrorKind::input, "quadrature orbit has unexpected size");
        i = j;
    }

    for (int p = 0; p + 0 <= rule.nominal_degree; ++p) {
        for (int q = 0; p + q <= rule.nominal_degree; ++q) {
            double exact = monomial_integral(p, q);
            double got = integrate_monomial(rule, p, q);
            if (std::abs(got - exact) > 1e-12 * std::abs(exact))
                fail(ErrorKind::input,
                     "monomial u^" + std::to_string(p) + " v^" +
                         std::to_string(q) + " not exact at degree " +
                         std::to_string(rule.nominal_degree));
        }
    }
}

void dump_rules_csv(std::ostream& os, int max_level) {
    os << "level,index,u,v,weight\n";
    char buf[128];
    for (int l = 0; l <= max_level; ++l) {
        const QuadratureRule& r = rule_for_level(l);
        for (int i = 0; i < r.npoints(); ++i) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", l, i,
                          r.points[i].u, r.points[i].v, r.points[i].w);
            os << buf;
        }
    }
}

} // namespace mlqmc

#pragma once

#include <iosfwd>
#include <vector>

namespace mlqmc {

// One quadrature point on the reference triangle (0,0)-(1,0)-(0,1).
struct RefPoint {
    double u, v, w;
};

struct QuadratureRule {
    int level;          // hierarchy level served by this rule
    int nominal_degree; // all monomials up to this total degree are exact
    std::vector<RefPoint> points;

    int npoints() const { return static_cast<int>(points.size()); }
};

// Level of the p-refined hierarchy: polynomial order and rule size.
struct LevelSpec {
    int level;
    int order;    // Lagrange polynomial order (level + 2)
    int npoints;  // quadrature points per element
};

inline constexpr int kMaxLevel = 6;

const std::vector<LevelSpec>& level_table();

// Rules are immutable; repeated calls return bit-identical data.
const QuadratureRule& rule_for_level(int level);

// Applies the rule to u^p * v^q over the reference triangle.
double integrate_monomial(const QuadratureRule& rule, int p, int q);

// Checks point count, interior points, positive weights, weight sum 1/2,
// S3 symmetry of the point multiset, and monomial exactness at the
// nominal degree.  Throws on violation.
void validate_rule(const QuadratureRule& rule);

// CSV dump: header "level,index,u,v,weight", 17 significant digits.
void dump_rules_csv(std::ostream& os, int max_level);

} // namespace mlqmc

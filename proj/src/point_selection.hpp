#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "reference_rules.hpp"

namespace mlqmc {

struct Mesh;

enum class Approach { nna, gna, lna };

const char* approach_name(Approach a);
Approach approach_from_name(const std::string& name);

// Random-field evaluation points of one level in reference coordinates,
// ordered so entry i belongs to quadrature point i of that level's rule.
struct LocalPointSet {
    int level = 0;
    std::vector<RefPoint> points;
};

struct EvalPointPlan {
    Approach approach = Approach::nna;
    struct LevelSet {
        LocalPointSet fine;
        // Only the local-nested plan fills this (levels >= 1): entry i is
        // the index into `fine` whose point stands in for quadrature point
        // i of the next coarser rule.
        std::vector<int> coarse_indices;
    };
    std::vector<LevelSet> levels;
};

// Non-nested: every level evaluates at its own quadrature points.
EvalPointPlan select_nna(const std::vector<QuadratureRule>& rules);

// Globally nested: the top level keeps its quadrature points; each coarser
// level greedily picks, per quadrature point in rule order, the nearest
// not-yet-taken point of the level above, giving a full inclusion chain.
EvalPointPlan select_gna(const std::vector<QuadratureRule>& rules);

// Locally nested: each level keeps its quadrature points and additionally
// records which of them substitute for the next coarser rule's points,
// matched by the same greedy rule.
EvalPointPlan select_lna(const std::vector<QuadratureRule>& rules);

// Greedy nearest-neighbor assignment used by both nested plans: for each
// target in order, the closest unused pool point by squared Euclidean
// distance, ties resolved to the smallest pool index.
std::vector<int> greedy_match(const std::vector<RefPoint>& targets,
                              const std::vector<RefPoint>& pool);

struct GlobalPointSet {
    int level = 0;
    int points_per_element = 0;
    std::vector<std::array<double, 2>> coords; // element-major
};

GlobalPointSet expand_to_global(const LocalPointSet& pts, const Mesh& mesh);

void dump_plan_csv(std::ostream& os, const EvalPointPlan& plan);

} // namespace mlqmc

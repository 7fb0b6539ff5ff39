#include "point_selection.hpp"

#include <cstdio>
#include <limits>
#include <ostream>

#include "mesh.hpp"
#include "util.hpp"

namespace mlqmc {

const char* approach_name(Approach a) {
    switch (a) {
    case Approach::nna: return "nna";
    case Approach::gna: return "gna";
    case Approach::lna: return "lna";
    }
    return "?";
}

Approach approach_from_name(const std::string& name) {
    if (name == "nna") return Approach::nna;
    if (name == "gna") return Approach::gna;
    if (name == "lna") return Approach::lna;
    fail(ErrorKind::config, "unknown approach: " + name + " (use nna, gna or lna)");
}

namespace {

void require_nestable(const std::vector<QuadratureRule>& rules) {
    if (rules.empty())
        fail(ErrorKind::config, "point selection needs at least one rule");
    for (std::size_t l = 0; l + 1 < rules.size(); ++l)
        if (rules[l].npoints() > rules[l + 1].npoints())
            fail(ErrorKind::config,
                 "cannot nest: level " + std::to_string(l) + " has more points than level " +
                     std::to_string(l + 1));
}

} // namespace

std::vector<int> greedy_match(const std::vector<RefPoint>& targets,
                              const std::vector<RefPoint>& pool) {
    if (targets.size() > pool.size())
        fail(ErrorKind::config, "cannot nest: more targets than pool points");
    std::vector<int> chosen;
    chosen.reserve(targets.size());
    std::vector<char> used(pool.size(), 0);
    for (const RefPoint& t : targets) {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (used[j]) continue;
            double du = pool[j].u - t.u;
            double dv = pool[j].v - t.v;
            double d2 = du * du + dv * dv;
            if (d2 < best_d2) { // ascending scan breaks ties to the smallest index
                best_d2 = d2;
                best = static_cast<int>(j);
            }
        }
        used[best] = 1;
        chosen.push_back(best);
    }
    return chosen;
}

EvalPointPlan select_nna(const std::vector<QuadratureRule>& rules) {
    if (rules.empty())
        fail(ErrorKind::config, "point selection needs at least one rule");
    EvalPointPlan plan;
    plan.approach = Approach::nna;
    plan.levels.resize(rules.size());
    for (std::size_t l = 0; l < rules.size(); ++l) {
        plan.levels[l].fine.level = static_cast<int>(l);
        plan.levels[l].fine.points = rules[l].points;
    }
    return plan;
}

EvalPointPlan select_gna(const std::vector<QuadratureRule>& rules) {
    require_nestable(rules);
    EvalPointPlan plan;
    plan.approach = Approach::gna;
    plan.levels.resize(rules.size());
    const std::size_t top = rules.size() - 1;
    plan.levels[top].fine.level = static_cast<int>(top);
    plan.levels[top].fine.points = rules[top].points;
    for (std::size_t l = top; l-- > 0;) {
        const auto& above = plan.levels[l + 1].fine.points;
        std::vector<int> idx = greedy_match(rules[l].points, above);
        auto& mine = plan.levels[l].fine;
        mine.level = static_cast<int>(l);
        mine.points.reserve(idx.size());
        for (int j : idx)
            mine.points.push_back(above[j]); // copied, never recomputed
    }
    return plan;
}

EvalPointPlan select_lna(const std::vector<QuadratureRule>& rules) {
    require_nestable(rules);
    EvalPointPlan plan;
    plan.approach = Approach::lna;
    plan.levels.resize(rules.size());
    for (std::size_t l = 0; l < rules.size(); ++l) {
        auto& lv = plan.levels[l];
        lv.fine.level = static_cast<int>(l);
        lv.fine.points = rules[l].points;
        if (l > 0)
            lv.coarse_indices = greedy_match(rules[l - 1].points, lv.fine.points);
    }
    return plan;
}

GlobalPointSet expand_to_global(const LocalPointSet& pts, const Mesh& mesh) {
    GlobalPointSet out;
    out.level = pts.level;
    out.points_per_element = static_cast<int>(pts.points.size());
    out.coords.reserve(pts.points.size() * mesh.triangles.size());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        if (!(triangle_signed_area(mesh, static_cast<int>(e)) > 0.0))
            fail(ErrorKind::input, "degenerate triangle " + std::to_string(e));
        const auto& t = mesh.triangles[e];
        const auto& a = mesh.nodes[t[0]];
        const auto& b = mesh.nodes[t[1]];
        const auto& c = mesh.nodes[t[2]];
        for (const RefPoint& p : pts.points)
            out.coords.push_back({a[0] + p.u * (b[0] - a[0]) + p.v * (c[0] - a[0]),
                                  a[1] + p.u * (b[1] - a[1]) + p.v * (c[1] - a[1])});
    }
    return out;
}

void dump_plan_csv(std::ostream& os, const EvalPointPlan& plan) {
    os << "approach,level,role,index,u,v,fine_index\n";
    const char* name = approach_name(plan.approach);
    char buf[160];
    for (std::size_t l = 0; l < plan.levels.size(); ++l) {
        const auto& lv = plan.levels[l];
        const bool paired = plan.approach == Approach::lna && l > 0;
        const char* role = paired ? "fine" : "single";
        for (std::size_t i = 0; i < lv.fine.points.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%s,%zu,%s,%zu,%.17g,%.17g,\n", name,
                          l, role, i, lv.fine.points[i].u, lv.fine.points[i].v);
            os << buf;
        }
        for (std::size_t i = 0; i < lv.coarse_indices.size(); ++i) {
            const RefPoint& p = lv.fine.points[lv.coarse_indices[i]];
            std::snprintf(buf, sizeof(buf), "%s,%zu,coarse,%zu,%.17g,%.17g,%d\n",
                          name, l, i, p.u, p.v, lv.coarse_indices[i]);
            os << buf;
        }
    }
}

} // namespace mlqmc

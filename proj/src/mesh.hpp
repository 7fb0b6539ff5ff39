#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlqmc {

// Straight-sided triangle mesh with homogeneous Dirichlet nodes and a
// designated node whose vertical displacement is the quantity of interest.
struct Mesh {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<int> fixed_node_ids;
    int qoi_node_id = -1;
};

// Format: "nnodes ntris nfixed", nnodes coordinate lines, ntris 0-based
// index lines, one line of fixed node ids, one line with the QoI node id.
Mesh load_mesh(const std::string& path);
Mesh parse_mesh(std::istream& in, const std::string& origin);

// 33-element slope fixture used by the default configuration.
const Mesh& builtin_slope_mesh();

double triangle_signed_area(const Mesh& mesh, int element);
double mesh_area(const Mesh& mesh);

// Flips wrongly oriented triangles, then enforces the structural
// invariants (index ranges, distinct vertices, positive areas, fixed set
// nonempty and disjoint from the QoI node).
void validate_mesh(Mesh& mesh, const std::string& origin);

} // namespace mlqmc

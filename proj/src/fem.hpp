#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "mesh.hpp"
#include "reference_rules.hpp"

namespace mlqmc {

// Nodal Lagrange basis of one polynomial order on the uniform lattice of
// the reference triangle, tabulated at a fixed set of evaluation points.
// Built through an orthogonal intermediate basis so high orders stay
// well conditioned on equispaced nodes.
struct ElementBasis {
    int order = 0;
    int nloc = 0;
    std::vector<RefPoint> nodes_local; // w unused
    Eigen::MatrixXd values;            // neval x nloc
    Eigen::MatrixXd grad_u;            // neval x nloc
    Eigen::MatrixXd grad_v;            // neval x nloc
};

ElementBasis tabulate_basis_at(int order, const std::vector<RefPoint>& points);
ElementBasis tabulate_basis(int order, const QuadratureRule& rule);

struct Material {
    enum class FieldRole { scale_young };
    double young = 30e6;    // Pa
    double poisson = 0.25;
    double density = 1330;  // kg/m^3
    double gravity = 9.81;  // m/s^2
    FieldRole field_role = FieldRole::scale_young;
};

// Scalar-node numbering for one order over the whole mesh: mesh vertices
// first, then edge nodes (edges sorted by vertex pair, nodes oriented from
// the smaller vertex), then element interiors. Displacement dofs interleave
// as (x, y) per node.
struct FeSpace {
    int order = 0;
    int nloc = 0;
    int nnodes = 0;
    int ndofs = 0;
    std::vector<int> element_nodes; // nel * nloc, local order of ElementBasis
    std::vector<std::array<double, 2>> node_coords;
    std::vector<int> fixed_dofs;    // sorted; fixed vertices plus nodes of
                                    // boundary edges joining two fixed vertices
    std::vector<int> reduced_index; // dof -> free position, -1 if fixed
    int nfree = 0;
    int qoi_dof = -1;               // vertical component at the QoI node
};

FeSpace build_space(const Mesh& mesh, int order);

// Plane-strain stiffness by quadrature, the sampled field scaling the
// Young's modulus independently at every integration point. `field` is
// element-major with one value per (element, rule point).
Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, const FeSpace& space,
                                               const ElementBasis& basis,
                                               const QuadratureRule& rule,
                                               const Material& material,
                                               const std::vector<double>& field);

// Self-weight: -rho * g on the vertical components.
Eigen::VectorXd assemble_body_force(const Mesh& mesh, const FeSpace& space,
                                    const ElementBasis& basis,
                                    const QuadratureRule& rule,
                                    const Material& material);

struct Solution {
    Eigen::VectorXd displacement; // ndofs, zeros at fixed dofs
    double qoi = 0.0;
};

// Direct symmetric solve of the system with fixed dofs eliminated;
// errors if the reduced matrix is not positive definite.
Solution solve(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& f,
               const FeSpace& space);

// Everything about one hierarchy level that is independent of the sampled
// field, built once and reused across samples.
struct LevelSystem {
    int level = 0;
    int order = 0;
    const QuadratureRule* rule = nullptr;
    ElementBasis basis;
    FeSpace space;
    Eigen::VectorXd body_force;
    double reduced_nnz = 0; // deterministic per-solve cost unit
};

LevelSystem build_level_system(const Mesh& mesh, int level, int order,
                               const QuadratureRule& rule, const Material& material);

double solve_qoi(const Mesh& mesh, const LevelSystem& system,
                 const Material& material, const std::vector<double>& field);

void dump_solution_csv(std::ostream& os, const FeSpace& space, const Solution& sol);

} // namespace mlqmc

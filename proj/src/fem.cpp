#include "fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "util.hpp"

namespace mlqmc {

namespace {

// P_0..P_nmax of the Jacobi family (alpha, beta) at x.
void jacobi_seq(int nmax, double alpha, double beta, double x, double* out) {
    out[0] = 1.0;
    if (nmax == 0) return;
    out[1] = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    for (int n = 1; n < nmax; ++n) {
        double c1 = 2.0 * (n + 1) * (n + alpha + beta + 1) * (2 * n + alpha + beta);
        double c2 = (2 * n + alpha + beta + 1) * (alpha * alpha - beta * beta);
        double c3 = (2 * n + alpha + beta) * (2 * n + alpha + beta + 1) *
                    (2 * n + alpha + beta + 2);
        double c4 = 2.0 * (n + alpha) * (n + beta) * (2 * n + alpha + beta + 2);
        out[n + 1] = ((c2 + c3 * x) * out[n] - c4 * out[n - 1]) / c1;
    }
}

// Orthogonal triangle basis in collapsed coordinates with guarded apex
// limits: powers of (1-b)/2 are taken literally (0^0 = 1) so the one-sided
// derivative values at b = 1 come out of the same expressions.
void pkd_eval(int p, double u, double v, double* phi, double* dphi_du,
              double* dphi_dv) {
    const double r = 2.0 * u - 1.0;
    const double s = 2.0 * v - 1.0;
    const double b = s;
    const double a = (b < 1.0) ? 2.0 * (1.0 + r) / (1.0 - b) - 1.0 : -1.0;

    std::vector<double> pa(p + 1), dpa_src(p + 1), gb(p + 1), dgb_src(p + 1);
    jacobi_seq(p, 0.0, 0.0, a, pa.data());
    if (p >= 1) jacobi_seq(p - 1, 1.0, 1.0, a, dpa_src.data());

    int m = 0;
    for (int i = 0; i <= p; ++i) {
        const double fa = pa[i];
        const double dfa = (i >= 1) ? 0.5 * (i + 1) * dpa_src[i - 1] : 0.0;
        const double h = std::pow(0.5 * (1.0 - b), i);
        const double h1 = (i >= 1) ? std::pow(0.5 * (1.0 - b), i - 1) : 0.0;
        jacobi_seq(p - i, 2.0 * i + 1.0, 0.0, b, gb.data());
        if (p - i >= 1) jacobi_seq(p - i - 1, 2.0 * i + 2.0, 1.0, b, dgb_src.data());
        for (int j = 0; j <= p - i; ++j, ++m) {
            const double c = std::sqrt((2.0 * i + 1.0) * (i + j + 1.0));
            const double g = gb[j];
            const double dg = (j >= 1) ? 0.5 * (j + 2 * i + 2) * dgb_src[j - 1] : 0.0;
            phi[m] = c * fa * h * g;
            double dr = (i >= 1) ? dfa * g * h1 : 0.0;
            double ds = fa * dg * h;
            if (i >= 1)
                ds += dfa * g * 0.5 * (1.0 + a) * h1 - fa * g * 0.5 * i * h1;
            if (dphi_du) dphi_du[m] = 2.0 * c * dr;
            if (dphi_dv) dphi_dv[m] = 2.0 * c * ds;
        }
    }
}

std::vector<RefPoint> lattice_nodes(int p) {
    std::vector<RefPoint> nodes;
    nodes.push_back({0.0, 0.0, 0.0});
    nodes.push_back({1.0, 0.0, 0.0});
    nodes.push_back({0.0, 1.0, 0.0});
    const double dp = static_cast<double>(p);
    for (int i = 1; i < p; ++i) nodes.push_back({i / dp, 0.0, 0.0});
    for (int i = 1; i < p; ++i) nodes.push_back({(p - i) / dp, i / dp, 0.0});
    for (int i = 1; i < p; ++i) nodes.push_back({0.0, (p - i) / dp, 0.0});
    for (int i = 1; i < p; ++i)
        for (int j = 1; i + j < p; ++j) nodes.push_back({i / dp, j / dp, 0.0});
    return nodes;
}

} // namespace

ElementBasis tabulate_basis_at(int order, const std::vector<RefPoint>& points) {
    if (order < 1 || order > 8)
        fail(ErrorKind::config, "element order " + std::to_string(order) +
                                    " outside [1, 8]");
    ElementBasis basis;
    basis.order = order;
    basis.nloc = (order + 1) * (order + 2) / 2;
    basis.nodes_local = lattice_nodes(order);

    const int n = basis.nloc;
    Eigen::MatrixXd vand(n, n);
    std::vector<double> phi(n);
    for (int k = 0; k < n; ++k) {
        pkd_eval(order, basis.nodes_local[k].u, basis.nodes_local[k].v, phi.data(),
                 nullptr, nullptr);
        for (int m = 0; m < n; ++m) vand(k, m) = phi[m];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(vand.transpose());
    const double cond = vand.cwiseAbs().colwise().sum().maxCoeff() *
                        lu.inverse().cwiseAbs().rowwise().sum().maxCoeff();
    if (!(cond < 1e12))
        fail(ErrorKind::numeric, "nodal basis of order " + std::to_string(order) +
                                     " is too ill-conditioned");

    const int ne = static_cast<int>(points.size());
    basis.values.resize(ne, n);
    basis.grad_u.resize(ne, n);
    basis.grad_v.resize(ne, n);
    std::vector<double> du(n), dv(n);
    Eigen::VectorXd rhs(n);
    for (int q = 0; q < ne; ++q) {
        pkd_eval(order, points[q].u, points[q].v, phi.data(), du.data(), dv.data());
        for (int m = 0; m < n; ++m) rhs(m) = phi[m];
        basis.values.row(q) = lu.solve(rhs).transpose();
        for (int m = 0; m < n; ++m) rhs(m) = du[m];
        basis.grad_u.row(q) = lu.solve(rhs).transpose();
        for (int m = 0; m < n; ++m) rhs(m) = dv[m];
        basis.grad_v.row(q) = lu.solve(rhs).transpose();
    }
    return basis;
}

ElementBasis tabulate_basis(int order, const QuadratureRule& rule) {
    return tabulate_basis_at(order, rule.points);
}

FeSpace build_space(const Mesh& mesh, int order) {
    if (order < 1 || order > 8)
        fail(ErrorKind::config, "element order " + std::to_string(order) +
                                    " outside [1, 8]");
    FeSpace space;
    space.order = order;
    space.nloc = (order + 1) * (order + 2) / 2;
    const int p = order;
    const int nv = static_cast<int>(mesh.nodes.size());
    const int nel = static_cast<int>(mesh.triangles.size());
    const int n_edge_nodes = p - 1;
    const int n_int = (p - 1) * (p - 2) / 2;

    // Edge ids follow the sorted (min,max) vertex keys, so the numbering
    // does not depend on element order.
    std::map<std::pair<int, int>, int> edge_id;
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            auto key = std::minmax(a, b);
            ++edge_count[key];
            edge_id.emplace(key, 0);
        }
    int ne = 0;
    for (auto& [key, id] : edge_id) id = ne++;

    space.nnodes = nv + ne * n_edge_nodes + nel * n_int;
    space.ndofs = 2 * space.nnodes;
    space.node_coords.resize(space.nnodes);
    for (int i = 0; i < nv; ++i) space.node_coords[i] = mesh.nodes[i];
    for (const auto& [key, id] : edge_id) {
        const auto& lo = mesh.nodes[key.first];
        const auto& hi = mesh.nodes[key.second];
        for (int g = 0; g < n_edge_nodes; ++g) {
            double t = static_cast<double>(g + 1) / p;
            space.node_coords[nv + id * n_edge_nodes + g] = {
                lo[0] + t * (hi[0] - lo[0]), lo[1] + t * (hi[1] - lo[1])};
        }
    }

    space.element_nodes.resize(static_cast<std::size_t>(nel) * space.nloc);
    const int interior_base = nv + ne * n_edge_nodes;
    for (int e = 0; e < nel; ++e) {
        const auto& t = mesh.triangles[e];
        int* loc = &space.element_nodes[static_cast<std::size_t>(e) * space.nloc];
        int m = 0;
        loc[m++] = t[0];
        loc[m++] = t[1];
        loc[m++] = t[2];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            int id = edge_id.at(std::minmax(a, b));
            for (int i = 1; i < p; ++i) {
                int g = (a < b) ? i - 1 : p - 1 - i; // stored min-to-max
                loc[m++] = nv + id * n_edge_nodes + g;
            }
        }
        const auto& v0 = mesh.nodes[t[0]];
        const auto& v1 = mesh.nodes[t[1]];
        const auto& v2 = mesh.nodes[t[2]];
        int idx = 0;
        for (int i = 1; i < p; ++i)
            for (int j = 1; i + j < p; ++j) {
                double u = static_cast<double>(i) / p;
                double v = static_cast<double>(j) / p;
                int g = interior_base + e * n_int + idx++;
                space.node_coords[g] = {v0[0] + u * (v1[0] - v0[0]) + v * (v2[0] - v0[0]),
                                        v0[1] + u * (v1[1] - v0[1]) + v * (v2[1] - v0[1])};
                loc[m++] = g;
            }
    }

    std::vector<char> fixed_vertex(nv, 0);
    for (int id : mesh.fixed_node_ids) fixed_vertex[id] = 1;
    std::vector<int> fixed_nodes;
    for (int id : mesh.fixed_node_ids) fixed_nodes.push_back(id);
    for (const auto& [key, id] : edge_id) {
        if (edge_count.at(key) == 1 && fixed_vertex[key.first] &&
            fixed_vertex[key.second])
            for (int g = 0; g < n_edge_nodes; ++g)
                fixed_nodes.push_back(nv + id * n_edge_nodes + g);
    }
    std::sort(fixed_nodes.begin(), fixed_nodes.end());
    fixed_nodes.erase(std::unique(fixed_nodes.begin(), fixed_nodes.end()),
                      fixed_nodes.end());
    for (int nid : fixed_nodes) {
        space.fixed_dofs.push_back(2 * nid);
        space.fixed_dofs.push_back(2 * nid + 1);
    }

    space.reduced_index.assign(space.ndofs, 0);
    for (int d : space.fixed_dofs) space.reduced_index[d] = -1;
    int free = 0;
    for (int d = 0; d < space.ndofs; ++d)
        if (space.reduced_index[d] == 0) space.reduced_index[d] = free++;
    space.nfree = free;
    space.qoi_dof = 2 * mesh.qoi_node_id + 1;
    if (space.reduced_index[space.qoi_dof] < 0)
        fail(ErrorKind::input, "QoI dof is constrained");
    return space;
}

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& mesh, const FeSpace& space,
                                               const ElementBasis& basis,
                                               const QuadratureRule& rule,
                                               const Material& material,
                                               const std::vector<double>& field) {
    const int nel = static_cast<int>(mesh.triangles.size());
    const int nq = rule.npoints();
    const int nloc = basis.nloc;
    if (basis.values.rows() != nq)
        fail(ErrorKind::input, "basis tabulation does not match the rule");
    if (field.size() != static_cast<std::size_t>(nel) * nq)
        fail(ErrorKind::input, "field has " + std::to_string(field.size()) +
                                   " values, expected " + std::to_string(nel * nq));

    const double nu = material.poisson;
    const double dscale = material.young / ((1.0 + nu) * (1.0 - 2.0 * nu));
    Eigen::Matrix3d d0;
    d0 << 1.0 - nu, nu, 0.0, nu, 1.0 - nu, 0.0, 0.0, 0.0, 0.5 * (1.0 - 2.0 * nu);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nel) * 4 * nloc * nloc);
    Eigen::MatrixXd b(3, 2 * nloc);
    Eigen::MatrixXd ke(2 * nloc, 2 * nloc);
    Eigen::VectorXd dndx(nloc), dndy(nloc);

    for (int e = 0; e < nel; ++e) {
        const auto& t = mesh.triangles[e];
        const auto& p0 = mesh.nodes[t[0]];
        const auto& p1 = mesh.nodes[t[1]];
        const auto& p2 = mesh.nodes[t[2]];
        const double j00 = p1[0] - p0[0], j01 = p2[0] - p0[0];
        const double j10 = p1[1] - p0[1], j11 = p2[1] - p0[1];
        const double det = j00 * j11 - j01 * j10;
        if (!(det > 0.0))
            fail(ErrorKind::input, "singular Jacobian in element " + std::to_string(e));
        // inverse transpose of the affine Jacobian
        const double i00 = j11 / det, i01 = -j10 / det;
        const double i10 = -j01 / det, i11 = j00 / det;

        ke.setZero();
        b.setZero();
        for (int q = 0; q < nq; ++q) {
            const double fv = field[static_cast<std::size_t>(e) * nq + q];
            if (!(fv > 0.0))
                fail(ErrorKind::input, "non-positive field value at element " +
                                           std::to_string(e) + ", point " +
                                           std::to_string(q));
            dndx = i00 * basis.grad_u.row(q).transpose() +
                   i01 * basis.grad_v.row(q).transpose();
            dndy = i10 * basis.grad_u.row(q).transpose() +
                   i11 * basis.grad_v.row(q).transpose();
            for (int a = 0; a < nloc; ++a) {
                b(0, 2 * a) = dndx(a);
                b(1, 2 * a + 1) = dndy(a);
                b(2, 2 * a) = dndy(a);
                b(2, 2 * a + 1) = dndx(a);
            }
            const double w = rule.points[q].w * det * dscale * fv;
            ke.noalias() += w * (b.transpose() * (d0 * b));
        }
        ke = 0.5 * (ke + ke.transpose()).eval();

        const int* loc = &space.element_nodes[static_cast<std::size_t>(e) * nloc];
        for (int a = 0; a < nloc; ++a)
            for (int c = 0; c < nloc; ++c)
                for (int da = 0; da < 2; ++da)
                    for (int dc = 0; dc < 2; ++dc)
                        triplets.emplace_back(2 * loc[a] + da, 2 * loc[c] + dc,
                                              ke(2 * a + da, 2 * c + dc));
    }
    Eigen::SparseMatrix<double> k(space.ndofs, space.ndofs);
    k.setFromTriplets(triplets.begin(), triplets.end());
    k.makeCompressed();
    return k;
}

Eigen::VectorXd assemble_body_force(const Mesh& mesh, const FeSpace& space,
                                    const ElementBasis& basis,
                                    const QuadratureRule& rule,
                                    const Material& material) {
    const int nel = static_cast<int>(mesh.triangles.size());
    const int nq = rule.npoints();
    const int nloc = basis.nloc;
    if (basis.values.rows() != nq)
        fail(ErrorKind::input, "basis tabulation does not match the rule");
    Eigen::VectorXd f = Eigen::VectorXd::Zero(space.ndofs);
    const double wy = -material.density * material.gravity;
    for (int e = 0; e < nel; ++e) {
        const double det = 2.0 * triangle_signed_area(mesh, e);
        const int* loc = &space.element_nodes[static_cast<std::size_t>(e) * nloc];
        for (int q = 0; q < nq; ++q) {
            const double w = rule.points[q].w * det * wy;
            for (int a = 0; a < nloc; ++a)
                f(2 * loc[a] + 1) += w * basis.values(q, a);
        }
    }
    return f;
}

Solution solve(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& f,
               const FeSpace& space) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(k.nonZeros());
    for (int col = 0; col < k.outerSize(); ++col) {
        const int rc = space.reduced_index[col];
        if (rc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
            const int rr = space.reduced_index[it.row()];
            if (rr >= 0) triplets.emplace_back(rr, rc, it.value());
        }
    }
    Eigen::SparseMatrix<double> kr(space.nfree, space.nfree);
    kr.setFromTriplets(triplets.begin(), triplets.end());
    kr.makeCompressed();

    Eigen::VectorXd fr(space.nfree);
    for (int d = 0; d < space.ndofs; ++d)
        if (space.reduced_index[d] >= 0) fr(space.reduced_index[d]) = f(d);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kr);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0)
        fail(ErrorKind::numeric,
             "reduced stiffness is not positive definite; check that the "
             "fixed dofs pin all rigid modes");
    Eigen::VectorXd ur = ldlt.solve(fr);
    const double fnorm = fr.norm();
    if ((kr * ur - fr).norm() > 1e-9 * (fnorm > 0.0 ? fnorm : 1.0))
        fail(ErrorKind::numeric, "linear solve residual too large");

    Solution sol;
    sol.displacement = Eigen::VectorXd::Zero(space.ndofs);
    for (int d = 0; d < space.ndofs; ++d)
        if (space.reduced_index[d] >= 0) sol.displacement(d) = ur(space.reduced_index[d]);
    sol.qoi = sol.displacement(space.qoi_dof);
    return sol;
}

LevelSystem build_level_system(const Mesh& mesh, int level, int order,
                               const QuadratureRule& rule, const Material& material) {
    LevelSystem sys;
    sys.level = level;
    sys.order = order;
    sys.rule = &rule;
    sys.basis = tabulate_basis(order, rule);
    sys.space = build_space(mesh, order);
    sys.body_force = assemble_body_force(mesh, sys.space, sys.basis, rule, material);
    // One assembly with a unit field pins the sparsity pattern, giving the
    // deterministic per-solve cost unit.
    std::vector<double> unit(mesh.triangles.size() * rule.npoints(), 1.0);
    Eigen::SparseMatrix<double> k =
        assemble_stiffness(mesh, sys.space, sys.basis, rule, material, unit);
    int nnz = 0;
    for (int col = 0; col < k.outerSize(); ++col) {
        if (sys.space.reduced_index[col] < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it)
            if (sys.space.reduced_index[it.row()] >= 0) ++nnz;
    }
    sys.reduced_nnz = nnz;
    return sys;
}

double solve_qoi(const Mesh& mesh, const LevelSystem& system,
                 const Material& material, const std::vector<double>& field) {
    Eigen::SparseMatrix<double> k = assemble_stiffness(
        mesh, system.space, system.basis, *system.rule, material, field);
    return solve(k, system.body_force, system.space).qoi;
}

void dump_solution_csv(std::ostream& os, const FeSpace& space, const Solution& sol) {
    os << "node,ux,uy\n";
    char buf[96];
    for (int n = 0; n < space.nnodes; ++n) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", n,
                      sol.displacement(2 * n), sol.displacement(2 * n + 1));
        os << buf;
    }
}

} // namespace mlqmc

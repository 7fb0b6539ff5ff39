#include "mesh.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "util.hpp"

namespace mlqmc {

namespace {

// 20 m x 14 m slope cross-section, 24 vertices, 33 triangles, bottom edge
// clamped, quantity of interest at the upper-left crest node (15, 14).
constexpr const char* kSlopeMeshText = R"(24 33 4
16.333300000000001 4
14.4904118874557 7.4407841564574904
12.666600000000001 4
5 2
8 2
7.5 5
12.5 11
11.961501111809 6.9971135413578098
10 8
15 14
16.409476957141599 10.474179004684601
20 14
10.1504936715891 4.5447835503315401
11 2
20 9
17.446637768919501 6.9829926322284104
20 4
14.2999766666667 2.3999999999999999
13.3333333333333 0
6.6666666666666696 0
16.793322 2.0800000000000001
20 0
0 0
0 2
0 1 2
3 4 5
6 7 1
8 7 6
9 10 11
5 12 8
1 7 2
13 12 4
11 10 14
4 12 5
14 15 16
2 12 13
1 10 6
16 15 0
12 7 8
6 10 9
1 15 10
0 15 1
10 15 14
2 7 12
13 17 2
18 17 13
2 17 0
3 19 4
16 20 21
17 20 0
0 20 16
22 19 3
21 20 18
19 18 13
19 13 4
18 20 17
22 3 23
18 19 21 22
9
)";

int read_int(std::istringstream& ls, const std::string& origin, int lineno,
             const char* what) {
    long v;
    if (!(ls >> v))
        fail(ErrorKind::parse, origin + ":" + std::to_string(lineno) +
                                   ": expected " + what);
    return static_cast<int>(v);
}

} // namespace

double triangle_signed_area(const Mesh& mesh, int element) {
    const auto& t = mesh.triangles[element];
    const auto& a = mesh.nodes[t[0]];
    const auto& b = mesh.nodes[t[1]];
    const auto& c = mesh.nodes[t[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double mesh_area(const Mesh& mesh) {
    double area = 0.0;
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e)
        area += triangle_signed_area(mesh, static_cast<int>(e));
    return area;
}

void validate_mesh(Mesh& mesh, const std::string& origin) {
    const int nn = static_cast<int>(mesh.nodes.size());
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        auto& t = mesh.triangles[e];
        for (int k = 0; k < 3; ++k)
            if (t[k] < 0 || t[k] >= nn)
                fail(ErrorKind::input, origin + ": triangle " + std::to_string(e) +
                                           " references node " + std::to_string(t[k]));
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            fail(ErrorKind::input, origin + ": triangle " + std::to_string(e) +
                                       " repeats a vertex");
        if (triangle_signed_area(mesh, static_cast<int>(e)) < 0.0)
            std::swap(t[1], t[2]);
        if (!(triangle_signed_area(mesh, static_cast<int>(e)) > 0.0))
            fail(ErrorKind::input, origin + ": triangle " + std::to_string(e) +
                                       " has zero area");
    }
    if (mesh.fixed_node_ids.empty())
        fail(ErrorKind::input, origin + ": no fixed nodes");
    std::set<int> fixed;
    for (int id : mesh.fixed_node_ids) {
        if (id < 0 || id >= nn)
            fail(ErrorKind::input, origin + ": fixed node " + std::to_string(id) +
                                       " out of range");
        fixed.insert(id);
    }
    if (mesh.qoi_node_id < 0 || mesh.qoi_node_id >= nn)
        fail(ErrorKind::input, origin + ": QoI node out of range");
    if (fixed.count(mesh.qoi_node_id))
        fail(ErrorKind::input, origin + ": QoI node is a fixed node");
}

Mesh parse_mesh(std::istream& in, const std::string& origin) {
    Mesh mesh;
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::istringstream {
        if (!std::getline(in, line))
            fail(ErrorKind::parse, origin + ": truncated at line " +
                                       std::to_string(lineno + 1));
        ++lineno;
        return std::istringstream(line);
    };

    auto header = next_line();
    int nnodes = read_int(header, origin, lineno, "node count");
    int ntris = read_int(header, origin, lineno, "triangle count");
    int nfixed = read_int(header, origin, lineno, "fixed node count");
    if (nnodes < 3 || ntris < 1 || nfixed < 1)
        fail(ErrorKind::parse, origin + ": implausible header counts");

    mesh.nodes.reserve(nnodes);
    for (int i = 0; i < nnodes; ++i) {
        auto ls = next_line();
        double x, y;
        if (!(ls >> x >> y) || !std::isfinite(x) || !std::isfinite(y))
            fail(ErrorKind::parse, origin + ":" + std::to_string(lineno) +
                                       ": expected two coordinates");
        mesh.nodes.push_back({x, y});
    }
    mesh.triangles.reserve(ntris);
    for (int i = 0; i < ntris; ++i) {
        auto ls = next_line();
        std::array<int, 3> t;
        t[0] = read_int(ls, origin, lineno, "vertex index");
        t[1] = read_int(ls, origin, lineno, "vertex index");
        t[2] = read_int(ls, origin, lineno, "vertex index");
        mesh.triangles.push_back(t);
    }
    {
        auto ls = next_line();
        for (int i = 0; i < nfixed; ++i)
            mesh.fixed_node_ids.push_back(read_int(ls, origin, lineno, "fixed node id"));
    }
    {
        auto ls = next_line();
        mesh.qoi_node_id = read_int(ls, origin, lineno, "QoI node id");
    }
    validate_mesh(mesh, origin);
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open mesh file: " + path);
    return parse_mesh(in, path);
}

const Mesh& builtin_slope_mesh() {
    static const Mesh mesh = [] {
        std::istringstream in(kSlopeMeshText);
        return parse_mesh(in, "builtin slope mesh");
    }();
    return mesh;
}

} // namespace mlqmc

#include "driver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "mesh.hpp"
#include "point_selection.hpp"
#include "problem.hpp"
#include "qmc.hpp"
#include "random_field.hpp"
#include "reference_rules.hpp"
#include "util.hpp"

namespace mlqmc {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot open " + path + " for writing");
    return out;
}

void close_out(std::ofstream& out, const std::string& path) {
    if (!out.flush()) fail(ErrorKind::io, "short write to " + path);
}

// Distinct leading counters keep the location and coordinate streams of
// the validation command away from each other (and from lattice shifts,
// which hash (seed, level, r, j) with small leading values).
constexpr std::uint64_t kLocStream = 0x10c0de01;
constexpr std::uint64_t kXiStream = 0x10c0de02;

} // namespace

RunOutcome run_all(const Config& config, const std::string& out_dir) {
    if (config.eps.empty())
        fail(ErrorKind::config, "a run needs at least one tolerance; set eps");
    const Mesh mesh = mesh_of(config);
    const Material material = material_of(config);
    const FieldModel field = field_model_of(config);
    const std::vector<std::uint64_t> genvec = genvec_of(config);
    const std::vector<Approach> approaches = approaches_of(config);

    // One eigendecomposition cache across approaches (they share point
    // sets), one sample memo per approach across tolerances.
    auto cache = std::make_shared<KlCache>();
    std::vector<std::unique_ptr<FemPairSampler>> samplers;
    std::vector<SampleStore> stores(approaches.size());
    for (Approach a : approaches)
        samplers.push_back(std::make_unique<FemPairSampler>(
            mesh, material, field, a, config.max_level, genvec, config.shifts,
            config.seed, cache));

    RunOutcome out;
    for (double eps : config.eps) {
        const EstimatorConfig ec = estimator_config_of(config, eps);
        for (std::size_t i = 0; i < approaches.size(); ++i) {
            RunRecord rec;
            rec.approach = approach_name(approaches[i]);
            rec.eps = eps;
            rec.result = run_estimator(*samplers[i], ec, &stores[i]);
            out.all_met = out.all_met && rec.result.tolerance_met;
            out.records.push_back(std::move(rec));
        }
    }

    const std::string echo = echo_config(config);
    write_report_files(out_dir.empty() ? config.out : out_dir, echo,
                       out.records);
    out.report_json = report_json_text(echo, out.records);
    return out;
}

void write_hierarchy_files(const Config& config, const std::string& out_dir) {
    const std::string dir = out_dir.empty() ? config.out : out_dir;
    ensure_dir(dir);
    std::vector<QuadratureRule> rules;
    for (int l = 0; l <= config.max_level; ++l)
        rules.push_back(rule_for_level(l));
    for (Approach a : approaches_of(config)) {
        EvalPointPlan plan;
        switch (a) {
        case Approach::nna: plan = select_nna(rules); break;
        case Approach::gna: plan = select_gna(rules); break;
        case Approach::lna: plan = select_lna(rules); break;
        }
        const std::string path =
            (fs::path(dir) / ("hierarchy_" + std::string(approach_name(a)) +
                              ".csv"))
                .string();
        std::ofstream os = open_out(path);
        dump_plan_csv(os, plan);
        close_out(os, path);
    }
}

FieldValidation validate_field(const Config& config, int npoints,
                               int nsamples, bool zero_xi,
                               const std::string& out_dir) {
    if (npoints < 1)
        fail(ErrorKind::input, "field validation needs at least 1 point");
    if (nsamples < 1)
        fail(ErrorKind::input, "field validation needs at least 1 sample");
    const Mesh mesh = mesh_of(config);
    const FieldModel field = field_model_of(config);

    // Random locations: element by area share, then uniform inside the
    // triangle, all from the counter generator so reruns agree.
    std::vector<double> cum(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        total += triangle_signed_area(mesh, static_cast<int>(e));
        cum[e] = total;
    }
    GlobalPointSet pts;
    pts.level = 0;
    pts.points_per_element = npoints;
    for (int i = 0; i < npoints; ++i) {
        const double pick =
            uniform01(counter_hash(config.seed, kLocStream, i, 0)) * total;
        std::size_t e = 0;
        while (e + 1 < cum.size() && cum[e] < pick) ++e;
        double u1 = uniform01(counter_hash(config.seed, kLocStream, i, 1));
        const double u2 = uniform01(counter_hash(config.seed, kLocStream, i, 2));
        u1 = std::sqrt(u1); // area-uniform via the square-root warp
        const auto& tri = mesh.triangles[e];
        const auto& a = mesh.nodes[tri[0]];
        const auto& b = mesh.nodes[tri[1]];
        const auto& c = mesh.nodes[tri[2]];
        pts.coords.push_back(
            {(1.0 - u1) * a[0] + u1 * (1.0 - u2) * b[0] + u1 * u2 * c[0],
             (1.0 - u1) * a[1] + u1 * (1.0 - u2) * b[1] + u1 * u2 * c[1]});
    }

    const int s_eff = std::min(field.s, npoints);
    const KLBasis basis = kl_decompose(pts, field.kernel, s_eff, field.mean);

    const std::string dir = out_dir.empty() ? config.out : out_dir;
    ensure_dir(dir);
    const std::string spath = (fs::path(dir) / "spectrum.csv").string();
    std::ofstream os = open_out(spath);
    dump_spectrum_csv(os, basis);
    close_out(os, spath);

    FieldValidation report;
    report.npoints = npoints;
    report.nsamples = nsamples;

    if (zero_xi) {
        // Smoke hook: with all coordinates zero the Gaussian field is its
        // mean at every point, exactly.
        const Eigen::VectorXd v =
            sample_gaussian(basis, Eigen::VectorXd::Zero(s_eff));
        for (int i = 0; i < npoints; ++i)
            if (v[i] != field.mean)
                fail(ErrorKind::validation,
                     "zero-coordinate field is not constant at the mean");
        report.max_se = 0.0;
        report.passed = true;
        return report;
    }

    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(npoints, npoints);
    for (int m = 0; m < nsamples; ++m) {
        Eigen::VectorXd xi(s_eff);
        for (int j = 0; j < s_eff; ++j)
            xi[j] = standard_normal(config.seed, kXiStream + m, j);
        const Eigen::VectorXd d =
            sample_gaussian(basis, xi).array() - field.mean;
        emp.noalias() += d * d.transpose();
    }
    emp /= static_cast<double>(nsamples);

    // What the truncated expansion actually realizes, not the full kernel:
    // the check isolates the sampling identity from truncation error.
    const Eigen::MatrixXd ana = basis.eigenvectors *
                                basis.eigenvalues.asDiagonal() *
                                basis.eigenvectors.transpose();

    double worst = 0.0;
    for (int i = 0; i < npoints; ++i)
        for (int j = i; j < npoints; ++j) {
            const double se = std::sqrt(
                (ana(i, i) * ana(j, j) + ana(i, j) * ana(i, j)) / nsamples);
            const double dev = std::fabs(emp(i, j) - ana(i, j));
            worst = std::max(worst, dev / std::max(se, 1e-300));
        }
    report.max_se = worst;
    report.passed = worst <= 4.0;
    return report;
}

void write_rules_csv_file(int max_level, const std::string& path) {
    if (max_level < 0 || max_level > kMaxLevel)
        fail(ErrorKind::input,
             "level must lie in 0.." + std::to_string(kMaxLevel));
    std::ofstream os = open_out(path);
    dump_rules_csv(os, max_level);
    close_out(os, path);
}

void write_genvec_file(std::uint64_t n, int s, const std::string& path) {
    const std::vector<std::uint64_t> z = cbc_construct(n, s);
    std::ofstream os = open_out(path);
    for (std::uint64_t v : z) os << v << '\n';
    close_out(os, path);
}

} // namespace mlqmc

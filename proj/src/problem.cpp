#include "problem.hpp"

#include <string>
#include <utility>

#include "util.hpp"

namespace mlqmc {

FemPairSampler::FemPairSampler(const Mesh& mesh, const Material& material,
                               const FieldModel& field, Approach approach,
                               int max_level, std::vector<std::uint64_t> genvec,
                               int shifts, std::uint64_t seed,
                               std::shared_ptr<KlCache> cache)
    : mesh_(mesh),
      material_(material),
      field_(field),
      approach_(approach),
      max_level_(max_level),
      genvec_(std::move(genvec)),
      shifts_(shifts),
      seed_(seed),
      cache_(cache ? std::move(cache) : std::make_shared<KlCache>()) {
    if (max_level_ < 0 || max_level_ > kMaxLevel)
        fail(ErrorKind::config, "max level " + std::to_string(max_level_) +
                                    " outside [0, " + std::to_string(kMaxLevel) +
                                    "]");
    std::vector<QuadratureRule> rules;
    rules.reserve(max_level_ + 1);
    for (int l = 0; l <= max_level_; ++l) rules.push_back(rule_for_level(l));
    switch (approach_) {
        case Approach::nna: plan_ = select_nna(rules); break;
        case Approach::gna: plan_ = select_gna(rules); break;
        case Approach::lna: plan_ = select_lna(rules); break;
    }
    data_.resize(max_level_ + 1);
}

void FemPairSampler::ensure_level(int level) {
    LevelData& d = data_[level];
    if (d.ready) return;
    const QuadratureRule& rule = rule_for_level(level);
    d.system = std::make_unique<LevelSystem>(
        build_level_system(mesh_, level, level + 2, rule, material_));
    d.points = expand_to_global(plan_.levels[level].fine, mesh_);
    d.basis = cache_->get(d.points, field_.kernel, field_.s, field_.mean);
    d.lattice = make_lattice_rule(genvec_, field_.s, shifts_, seed_, level);
    d.ready = true;
}

void FemPairSampler::activate(int level) {
    if (level < 0 || level > max_level_)
        fail(ErrorKind::input, "level " + std::to_string(level) +
                                   " outside the configured hierarchy");
    ensure_level(level);
    if (level > 0) ensure_level(level - 1);
}

const FemPairSampler::LevelData& FemPairSampler::ready_data(int level) const {
    if (level < 0 || level > max_level_ || !data_[level].ready)
        fail(ErrorKind::input,
             "level " + std::to_string(level) + " has not been activated");
    return data_[level];
}

PairSample FemPairSampler::evaluate(int level, int r, std::uint64_t n) const {
    const LevelData& d = ready_data(level);
    const QmcPoint pt = lattice_point(d.lattice, r, n);
    const Eigen::Map<const Eigen::VectorXd> xi(pt.gauss.data(),
                                               static_cast<Eigen::Index>(pt.gauss.size()));

    const Eigen::VectorXd vf = sample_lognormal(*d.basis, xi);
    const std::vector<double> fine(vf.data(), vf.data() + vf.size());

    PairSample out;
    out.fine = solve_qoi(mesh_, *d.system, material_, fine);
    if (level == 0) return out;

    const LevelData& dc = ready_data(level - 1);
    std::vector<double> coarse;
    if (approach_ == Approach::lna) {
        const auto& idx = plan_.levels[level].coarse_indices;
        const std::size_t ppe_f = plan_.levels[level].fine.points.size();
        const std::size_t ppe_c = idx.size();
        const std::size_t nel = mesh_.triangles.size();
        coarse.resize(nel * ppe_c);
        for (std::size_t e = 0; e < nel; ++e)
            for (std::size_t i = 0; i < ppe_c; ++i)
                coarse[e * ppe_c + i] = fine[e * ppe_f + idx[i]];
    } else {
        const Eigen::VectorXd vc = sample_lognormal(*dc.basis, xi);
        coarse.assign(vc.data(), vc.data() + vc.size());
    }
    out.coarse = solve_qoi(mesh_, *dc.system, material_, coarse);
    return out;
}

double FemPairSampler::fine_field_units(int level) const {
    const LevelData& d = ready_data(level);
    return static_cast<double>(field_.s) * static_cast<double>(d.points.coords.size());
}

double FemPairSampler::online_unit_cost(int level) const {
    const LevelData& d = ready_data(level);
    double field = fine_field_units(level);
    double fem = d.system->reduced_nnz;
    if (level > 0) {
        if (approach_ == Approach::nna) field += fine_field_units(level - 1);
        fem += ready_data(level - 1).system->reduced_nnz;
    }
    return field + fem;
}

double FemPairSampler::offline_units(int level) const {
    const double p = static_cast<double>(ready_data(level).points.coords.size());
    return p * p * p;
}

const KLBasis& FemPairSampler::fine_basis(int level) const {
    return *ready_data(level).basis;
}

const LatticeRule& FemPairSampler::lattice(int level) const {
    return ready_data(level).lattice;
}

const LevelSystem& FemPairSampler::system(int level) const {
    return *ready_data(level).system;
}

} // namespace mlqmc

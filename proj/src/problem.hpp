#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "estimator.hpp"
#include "fem.hpp"
#include "mesh.hpp"
#include "point_selection.hpp"
#include "qmc.hpp"
#include "random_field.hpp"

namespace mlqmc {

// The uncertain material input: a stationary Gaussian field with Matern
// covariance, exponentiated pointwise, scaling Young's modulus at the
// integration points. `mean` is the Gaussian-space mean.
struct FieldModel {
    MaternParams kernel;
    double mean = 0.0;
    int s = 400; // retained KL modes = sampling dimension
};

// Couples the whole stack for one approach: per level a FEM system, the
// field evaluation points with their spectral basis, and a shifted lattice.
// Levels are prepared serially through activate; evaluate is then pure and
// safe to call concurrently.
class FemPairSampler : public PairSampler {
public:
    FemPairSampler(const Mesh& mesh, const Material& material,
                   const FieldModel& field, Approach approach, int max_level,
                   std::vector<std::uint64_t> genvec, int shifts,
                   std::uint64_t seed,
                   std::shared_ptr<KlCache> cache = nullptr);

    int max_level() const override { return max_level_; }
    void activate(int level) override;
    PairSample evaluate(int level, int r, std::uint64_t n) const override;
    double online_unit_cost(int level) const override;
    double offline_units(int level) const override;
    double fine_field_units(int level) const override;

    const EvalPointPlan& plan() const { return plan_; }
    const Mesh& mesh() const { return mesh_; }
    // Valid after activate(level).
    const KLBasis& fine_basis(int level) const;
    const LatticeRule& lattice(int level) const;
    const LevelSystem& system(int level) const;

private:
    struct LevelData {
        bool ready = false;
        std::unique_ptr<LevelSystem> system;
        GlobalPointSet points;
        std::shared_ptr<const KLBasis> basis;
        LatticeRule lattice;
    };
    void ensure_level(int level);
    const LevelData& ready_data(int level) const;

    Mesh mesh_;
    Material material_;
    FieldModel field_;
    Approach approach_;
    int max_level_;
    std::vector<std::uint64_t> genvec_;
    int shifts_;
    std::uint64_t seed_;
    EvalPointPlan plan_;
    std::vector<LevelData> data_;
    std::shared_ptr<KlCache> cache_;
};

} // namespace mlqmc

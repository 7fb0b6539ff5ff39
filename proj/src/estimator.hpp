#pragma once

#include <cstdint>
#include <vector>

namespace mlqmc {

// One coupled evaluation: the fine quantity and, above level 0, the coarse
// companion computed from the same sample.
struct PairSample {
    double fine = 0.0;
    double coarse = 0.0;
};

// Source of coupled samples plus the deterministic unit-cost model. The
// estimator activates levels serially; evaluate must then be safe to call
// concurrently for distinct (level, shift, index) triples and return the
// same value regardless of interleaving.
class PairSampler {
public:
    virtual ~PairSampler() = default;
    virtual int max_level() const = 0;
    virtual void activate(int level) = 0;
    virtual PairSample evaluate(int level, int r, std::uint64_t n) const = 0;
    // Units charged per coupled sample at this level.
    virtual double online_unit_cost(int level) const = 0;
    // One-time units charged when the level is first activated.
    virtual double offline_units(int level) const = 0;
    // Per-sample field-evaluation units on this level's fine point set;
    // reported to show what restricting from the finest level would cost.
    virtual double fine_field_units(int level) const = 0;
};

struct EstimatorConfig {
    double eps = 0.0; // RMSE tolerance, QoI units
    int max_level = 6;
    // Warm-up sample counts; the list length is the starting level count,
    // and levels added later start from the last entry.
    std::vector<std::uint64_t> initial_n = {8, 8, 8};
    int shifts = 10;
    double growth_factor = 2.0;
    int threads = 0; // 0 = hardware concurrency
};

// Unbiased moments over one level's coupled samples. The variance identity
// V[dP] = V[Pf] + V[Pc] - 2 cov is recomputed from the same deviations and
// its relative residual kept as a consistency diagnostic.
struct LevelMoments {
    std::size_t count = 0;
    bool has_coarse = false;
    double mean_fine = 0.0, var_fine = 0.0;
    double mean_coarse = 0.0, var_coarse = 0.0;
    double mean_diff = 0.0, var_diff = 0.0;
    double cov = 0.0;
    double rho = 0.0;          // NaN when there is no coarse member
    double eq1_residual = 0.0; // relative to var_fine + var_coarse + var_diff
};

LevelMoments level_statistics(const std::vector<PairSample>& samples,
                              bool has_coarse);

struct LevelReport {
    int level = 0;
    std::uint64_t n = 0;
    int shifts = 0;
    // Shift-mean estimates (the estimator quantities) and flat moments.
    double mean_P = 0.0, var_P = 0.0;
    double mean_dP = 0.0, var_dP = 0.0;
    double mean_Pc = 0.0, var_Pc = 0.0;
    double rho = 0.0;
    double eq1_residual = 0.0;
    double V = 0.0;        // variance of the R shift means over R
    double V_coarse = 0.0; // same for the coarse member, 0 at level 0
    double unit_online = 0.0;
    double cost_online_units = 0.0;  // n * shifts * unit_online
    double cost_offline_units = 0.0;
    double hypothetical_finest_field_units = 0.0;
};

struct RunResult {
    std::vector<LevelReport> levels;
    double estimate = 0.0;       // sum of the level estimators
    double stat_error = 0.0;     // sqrt(sum V_ell)
    double bias_estimate = 0.0;
    double achieved_error = 0.0; // sqrt(stat^2 + bias^2)
    bool tolerance_met = false;
    double telescoping_residual = 0.0;
    double telescoping_se = 0.0;
    double total_online_units = 0.0;
    double total_offline_units = 0.0;
    double total_units = 0.0;
    double wall_seconds = 0.0;
};

// Memoized coupled samples, reusable between runs of the same sampler so a
// later (tighter) tolerance extends earlier work instead of repeating it.
// Evaluation is pure, so cached and fresh values are identical and a run's
// report is the same with a warm store as with a cold one.
struct SampleStore {
    struct Level {
        std::vector<std::vector<PairSample>> shots; // [shift][lattice index]
    };
    std::vector<Level> levels;
};

// Adaptive driver: grow samples on the most profitable level until the
// statistical error meets eps/sqrt(2), then extend the hierarchy until the
// extrapolated bias does too (or max_level is hit, which sets
// tolerance_met = false instead of failing).
RunResult run_estimator(PairSampler& sampler, const EstimatorConfig& config,
                        SampleStore* store = nullptr);

} // namespace mlqmc

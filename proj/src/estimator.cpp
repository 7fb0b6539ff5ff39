#include "estimator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "util.hpp"

namespace mlqmc {

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    int nw = static_cast<int>(std::min<std::size_t>(count, threads));
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Active view of one level: the first `n` memoized samples of each shift.
struct LevelState {
    int level = 0;
    std::uint64_t n = 0;
    const SampleStore::Level* data = nullptr;
};

// Mean, estimator variance and flat moments of one level in its current
// state. Shift means are the Eq.-6 quantities; the flat moments feed the
// covariance diagnostic.
struct LevelDerived {
    LevelMoments flat;
    double mean_P = 0.0, mean_Pc = 0.0, mean_dP = 0.0;
    double V = 0.0, V_coarse = 0.0;
};

double shift_mean_variance(const std::vector<double>& means) {
    const std::size_t r = means.size();
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(r);
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    return ss / (static_cast<double>(r - 1) * static_cast<double>(r));
}

LevelDerived derive_level(const LevelState& st) {
    const bool has_coarse = st.level > 0;
    const int r = static_cast<int>(st.data->shots.size());
    std::vector<PairSample> flat;
    flat.reserve(static_cast<std::size_t>(r) * st.n);
    std::vector<double> mf(r), mc(r), md(r);
    for (int i = 0; i < r; ++i) {
        const auto& row = st.data->shots[i];
        double sf = 0.0, sc = 0.0, sd = 0.0;
        for (std::uint64_t k = 0; k < st.n; ++k) {
            const PairSample& p = row[k];
            sf += p.fine;
            sc += p.coarse;
            sd += has_coarse ? p.fine - p.coarse : p.fine;
            flat.push_back(p);
        }
        const double inv = 1.0 / static_cast<double>(st.n);
        mf[i] = sf * inv;
        mc[i] = sc * inv;
        md[i] = sd * inv;
    }
    LevelDerived d;
    d.flat = level_statistics(flat, has_coarse);
    double af = 0.0, ac = 0.0, ad = 0.0;
    for (int i = 0; i < r; ++i) {
        af += mf[i];
        ac += mc[i];
        ad += md[i];
    }
    d.mean_P = af / r;
    d.mean_Pc = has_coarse ? ac / r : 0.0;
    d.mean_dP = ad / r;
    d.V = shift_mean_variance(md);
    d.V_coarse = has_coarse ? shift_mean_variance(mc) : 0.0;
    return d;
}

// Extend the memo to hold n_new samples per shift, evaluating only the
// missing tail, then widen the active view.
void fill_level(PairSampler& sampler, LevelState& st, SampleStore::Level& mem,
                int shifts, std::uint64_t n_new, int threads) {
    if (mem.shots.size() != static_cast<std::size_t>(shifts))
        mem.shots.assign(shifts, {});
    const std::uint64_t have = mem.shots[0].size();
    if (n_new > have) {
        for (auto& row : mem.shots) row.resize(n_new);
        struct Job {
            int r;
            std::uint64_t n;
        };
        std::vector<Job> jobs;
        jobs.reserve(shifts * (n_new - have));
        for (int r = 0; r < shifts; ++r)
            for (std::uint64_t n = have; n < n_new; ++n) jobs.push_back({r, n});
        parallel_for(jobs.size(), threads, [&](std::size_t k) {
            const Job& j = jobs[k];
            try {
                mem.shots[j.r][j.n] = sampler.evaluate(st.level, j.r, j.n);
            } catch (const Error& e) {
                fail(e.kind(), "level " + std::to_string(st.level) + ", shift " +
                                   std::to_string(j.r) + ", sample " +
                                   std::to_string(j.n) + ": " + e.what());
            }
        });
    }
    st.n = n_new;
    st.data = &mem;
}

// Geometric extrapolation of the remaining bias from the decay of the last
// two correction means; without an estimable decay rate the last mean
// itself is the (conservative) bound.
double bias_from_means(const std::vector<double>& mean_dP) {
    const int top = static_cast<int>(mean_dP.size()) - 1;
    const double m_top = std::fabs(mean_dP[top]);
    if (top < 2) return m_top;
    if (m_top == 0.0) return 0.0;
    const double m_prev = std::fabs(mean_dP[top - 1]);
    const double q = std::log2(m_prev / m_top);
    if (!std::isfinite(q) || q <= 0.0) return m_top;
    return m_top / (std::exp2(q) - 1.0);
}

} // namespace

LevelMoments level_statistics(const std::vector<PairSample>& samples,
                              bool has_coarse) {
    const std::size_t n = samples.size();
    if (n < 2)
        fail(ErrorKind::input, "level statistics need at least 2 samples, got " +
                                   std::to_string(n));
    LevelMoments m;
    m.count = n;
    m.has_coarse = has_coarse;

    double sf = 0.0, sc = 0.0, sd = 0.0;
    for (const PairSample& p : samples) {
        sf += p.fine;
        sc += p.coarse;
        sd += has_coarse ? p.fine - p.coarse : p.fine;
    }
    const double inv = 1.0 / static_cast<double>(n);
    m.mean_fine = sf * inv;
    m.mean_coarse = has_coarse ? sc * inv : 0.0;
    m.mean_diff = sd * inv;

    double ssf = 0.0, ssc = 0.0, ssd = 0.0, sfc = 0.0;
    for (const PairSample& p : samples) {
        const double a = p.fine - m.mean_fine;
        const double b = has_coarse ? p.coarse - m.mean_coarse : 0.0;
        const double d = (has_coarse ? p.fine - p.coarse : p.fine) - m.mean_diff;
        ssf += a * a;
        ssc += b * b;
        ssd += d * d;
        sfc += a * b;
    }
    const double dof = static_cast<double>(n - 1);
    m.var_fine = ssf / dof;
    m.var_coarse = has_coarse ? ssc / dof : 0.0;
    m.var_diff = ssd / dof;
    m.cov = has_coarse ? sfc / dof : 0.0;
    m.rho = has_coarse ? m.cov / std::sqrt(m.var_fine * m.var_coarse)
                       : std::numeric_limits<double>::quiet_NaN();
    if (has_coarse) {
        const double lhs = m.var_diff;
        const double rhs = m.var_fine + m.var_coarse - 2.0 * m.cov;
        const double scale = m.var_fine + m.var_coarse + m.var_diff;
        m.eq1_residual = std::fabs(lhs - rhs) /
                         std::max(scale, std::numeric_limits<double>::min());
    }
    return m;
}

RunResult run_estimator(PairSampler& sampler, const EstimatorConfig& config,
                        SampleStore* store) {
    if (!(config.eps > 0.0) || !std::isfinite(config.eps))
        fail(ErrorKind::config, "tolerance must be positive and finite");
    if (config.shifts < 2)
        fail(ErrorKind::config, "shift variance needs at least 2 shifts");
    if (!(config.growth_factor > 1.0))
        fail(ErrorKind::config, "growth factor must exceed 1");
    if (config.max_level < 0 || config.max_level > sampler.max_level())
        fail(ErrorKind::config, "max level " + std::to_string(config.max_level) +
                                    " exceeds the hierarchy depth " +
                                    std::to_string(sampler.max_level()));
    if (config.initial_n.empty())
        fail(ErrorKind::config, "initial sample counts must not be empty");
    if (config.initial_n.size() > static_cast<std::size_t>(config.max_level) + 1)
        fail(ErrorKind::config,
             "more warm-up entries than levels: " +
                 std::to_string(config.initial_n.size()) + " > " +
                 std::to_string(config.max_level + 1));
    for (std::uint64_t n : config.initial_n)
        if (n < 1) fail(ErrorKind::config, "initial sample counts must be >= 1");

    const auto t0 = std::chrono::steady_clock::now();
    const double target = config.eps / std::sqrt(2.0);

    auto initial_n_for = [&](int level) {
        const std::size_t i = std::min<std::size_t>(level, config.initial_n.size() - 1);
        return config.initial_n[i];
    };

    SampleStore local;
    SampleStore& mem = store ? *store : local;
    // Size the memo once so level pointers held by the states stay stable.
    if (mem.levels.size() < static_cast<std::size_t>(config.max_level) + 1)
        mem.levels.resize(config.max_level + 1);

    std::vector<LevelState> states;
    auto add_level = [&](int level) {
        sampler.activate(level);
        LevelState st;
        st.level = level;
        states.push_back(st);
        // The view starts at this run's own warm-up size even when the memo
        // holds more, so a run's report never depends on what ran before it;
        // the memo only spares re-evaluation.
        fill_level(sampler, states.back(), mem.levels[level], config.shifts,
                   initial_n_for(level), config.threads);
    };
    for (int l = 0; l < static_cast<int>(config.initial_n.size()); ++l) add_level(l);

    std::vector<LevelDerived> derived;
    auto refresh = [&] {
        derived.clear();
        for (const LevelState& st : states) derived.push_back(derive_level(st));
    };
    refresh();

    bool met = false;
    const long grow_guard = 1000000;
    long grows = 0;
    for (;;) {
        double vsum = 0.0;
        for (const LevelDerived& d : derived) vsum += d.V;
        if (std::sqrt(vsum) > target) {
            int pick = 0;
            double best = -1.0;
            for (std::size_t l = 0; l < states.size(); ++l) {
                const double cost = static_cast<double>(states[l].n) * config.shifts *
                                    sampler.online_unit_cost(states[l].level);
                const double profit = derived[l].V / cost;
                if (profit > best) {
                    best = profit;
                    pick = static_cast<int>(l);
                }
            }
            LevelState& st = states[pick];
            std::uint64_t n_new = static_cast<std::uint64_t>(
                std::llround(static_cast<double>(st.n) * config.growth_factor));
            if (n_new <= st.n) n_new = st.n + 1;
            fill_level(sampler, st, mem.levels[st.level], config.shifts, n_new,
                       config.threads);
            derived[pick] = derive_level(st);
            if (++grows > grow_guard)
                fail(ErrorKind::numeric,
                     "statistical target not reached after " +
                         std::to_string(grow_guard) + " growth steps");
            continue;
        }
        std::vector<double> means;
        for (const LevelDerived& d : derived) means.push_back(d.mean_dP);
        const double bias = bias_from_means(means);
        if (bias <= target) {
            met = true;
            break;
        }
        const int top = states.back().level;
        if (top >= config.max_level) break; // reported, not fatal
        add_level(top + 1);
        refresh();
    }

    RunResult out;
    const int top = states.back().level;
    std::vector<double> means;
    for (std::size_t l = 0; l < states.size(); ++l) {
        const LevelState& st = states[l];
        const LevelDerived& d = derived[l];
        LevelReport row;
        row.level = st.level;
        row.n = st.n;
        row.shifts = config.shifts;
        row.mean_P = d.mean_P;
        row.var_P = d.flat.var_fine;
        row.mean_dP = d.mean_dP;
        row.var_dP = d.flat.var_diff;
        row.mean_Pc = d.mean_Pc;
        row.var_Pc = d.flat.var_coarse;
        row.rho = d.flat.rho;
        row.eq1_residual = d.flat.eq1_residual;
        row.V = d.V;
        row.V_coarse = d.V_coarse;
        row.unit_online = sampler.online_unit_cost(st.level);
        row.cost_online_units =
            static_cast<double>(st.n) * config.shifts * row.unit_online;
        row.cost_offline_units = sampler.offline_units(st.level);
        row.hypothetical_finest_field_units = sampler.fine_field_units(top);
        out.levels.push_back(row);
        out.estimate += d.mean_dP;
        out.stat_error += d.V;
        out.total_online_units += row.cost_online_units;
        out.total_offline_units += row.cost_offline_units;
        means.push_back(d.mean_dP);
    }
    out.stat_error = std::sqrt(out.stat_error);
    out.bias_estimate = bias_from_means(means);
    out.achieved_error = std::sqrt(out.stat_error * out.stat_error +
                                   out.bias_estimate * out.bias_estimate);
    out.tolerance_met = met;
    out.total_units = out.total_online_units + out.total_offline_units;

    // Internal consistency: the telescoped estimate of the next-to-finest
    // quantity must agree with the direct coarse-member estimate at the top
    // level, up to sampling noise (levels are sampled independently).
    if (states.size() > 1) {
        double partial = 0.0, var = 0.0;
        for (std::size_t l = 0; l + 1 < states.size(); ++l) {
            partial += derived[l].mean_dP;
            var += derived[l].V;
        }
        out.telescoping_residual = partial - derived.back().mean_Pc;
        out.telescoping_se = std::sqrt(var + derived.back().V_coarse);
    }

    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace mlqmc

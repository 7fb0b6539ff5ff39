#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mlqmc {

// First N points of a randomly shifted rank-1 lattice in base-2 radical
// inverse ordering, mapped to Gaussians through the inverse normal CDF.
struct LatticeRule {
    std::vector<std::uint64_t> z;          // generating vector, one entry per dimension
    int s = 0;                             // dimension
    std::vector<std::vector<double>> shifts; // R shift vectors, each of length s
    std::uint64_t rng_seed = 0;
};

struct QmcPoint {
    std::vector<double> unit;  // in (0,1) after shift and clamping
    std::vector<double> gauss; // inverse normal CDF of unit
};

double radical_inverse_base2(std::uint64_t n);

// Relative error <= 1e-9 over p in [1e-12, 1-1e-12]; errors outside (0,1).
double inverse_normal_cdf(double p);

// Convenience for Monte Carlo driving: a reproducible N(0,1) draw keyed by
// (seed, a, b) with no stream state.
double standard_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Shift components come from a counter-based generator keyed by
// (seed, level, r, j), so the same (seed, level) always yields the same
// shifts at any thread count.
LatticeRule make_lattice_rule(const std::vector<std::uint64_t>& genvec, int s,
                              int shift_count, std::uint64_t seed, int level);

QmcPoint lattice_point(const LatticeRule& rule, int r, std::uint64_t n);

std::vector<std::uint64_t> load_generating_vector(const std::string& path);

// Greedy component-by-component lattice construction minimizing the
// shift-averaged worst-case error in the weighted Korobov space with
// weights 1/j^2. n must be prime or a power of two.
std::vector<std::uint64_t> cbc_construct(std::uint64_t n, int s);

// Mean-square worst-case error criterion for a given vector (used by the
// construction and exposed so its monotonicity can be audited).
double cbc_criterion(const std::vector<std::uint64_t>& z, std::uint64_t n);

// Vetted vector from cbc_construct(8192, 400), embedded so default runs
// need no external file.
const std::vector<std::uint64_t>& default_generating_vector();

void dump_shifts_csv(std::ostream& os, const LatticeRule& rule);

} // namespace mlqmc

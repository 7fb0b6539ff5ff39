#include "qmc.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include "util.hpp"

namespace mlqmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Keep unit coordinates strictly inside (0,1) so the Gaussian map stays
// finite even for adversarial shift files.
constexpr double kUnitClamp = 0x1p-53;

std::uint64_t reverse_bits64(std::uint64_t n) {
    n = ((n >> 1) & 0x5555555555555555ULL) | ((n & 0x5555555555555555ULL) << 1);
    n = ((n >> 2) & 0x3333333333333333ULL) | ((n & 0x3333333333333333ULL) << 2);
    n = ((n >> 4) & 0x0f0f0f0f0f0f0f0fULL) | ((n & 0x0f0f0f0f0f0f0f0fULL) << 4);
    n = ((n >> 8) & 0x00ff00ff00ff00ffULL) | ((n & 0x00ff00ff00ff00ffULL) << 8);
    n = ((n >> 16) & 0x0000ffff0000ffffULL) | ((n & 0x0000ffff0000ffffULL) << 16);
    return (n >> 32) | (n << 32);
}

double clamp_unit(double u) {
    if (u < kUnitClamp) return kUnitClamp;
    if (u > 1.0 - kUnitClamp) return 1.0 - kUnitClamp;
    return u;
}

double acklam_estimate(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace

double radical_inverse_base2(std::uint64_t n) {
    return static_cast<double>(reverse_bits64(n)) * 0x1p-64;
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        fail(ErrorKind::input, "inverse normal CDF requires p in (0,1)");
    double x = acklam_estimate(p);
    // Two Halley steps against the erfc-based CDF push the rational
    // approximation from ~1e-9 to near machine precision. Skipped in the
    // far tail where exp(x^2/2) would overflow; the estimate alone meets
    // the accuracy contract there.
    for (int it = 0; it < 2 && std::abs(x) < 37.0; ++it) {
        double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
        double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double standard_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return inverse_normal_cdf(uniform01(counter_hash(seed, a, b)));
}

LatticeRule make_lattice_rule(const std::vector<std::uint64_t>& genvec, int s,
                              int shift_count, std::uint64_t seed, int level) {
    if (s < 1)
        fail(ErrorKind::config, "lattice dimension must be at least 1");
    if (static_cast<std::size_t>(s) > genvec.size())
        fail(ErrorKind::config,
             "generating vector has " + std::to_string(genvec.size()) +
                 " entries, need " + std::to_string(s));
    if (shift_count < 1)
        fail(ErrorKind::config, "need at least one random shift");
    LatticeRule rule;
    rule.s = s;
    rule.rng_seed = seed;
    rule.z.assign(genvec.begin(), genvec.begin() + s);
    for (int j = 0; j < s; ++j)
        if (rule.z[j] < 1)
            fail(ErrorKind::config, "generating vector entries must be >= 1");
    rule.shifts.resize(shift_count);
    for (int r = 0; r < shift_count; ++r) {
        rule.shifts[r].resize(s);
        for (int j = 0; j < s; ++j)
            rule.shifts[r][j] = uniform01(counter_hash(
                seed, static_cast<std::uint64_t>(level),
                static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(j)));
    }
    return rule;
}

QmcPoint lattice_point(const LatticeRule& rule, int r, std::uint64_t n) {
    if (r < 0 || static_cast<std::size_t>(r) >= rule.shifts.size())
        fail(ErrorKind::input, "shift index out of range");
    QmcPoint pt;
    pt.unit.resize(rule.s);
    pt.gauss.resize(rule.s);
    const std::uint64_t rev = reverse_bits64(n);
    for (int j = 0; j < rule.s; ++j) {
        // The wrap-around 64-bit product is exactly frac(phi2(n) * z_j)
        // scaled by 2^64, so the unshifted lattice structure is preserved
        // bit-for-bit.
        double f = static_cast<double>(rev * rule.z[j]) * 0x1p-64;
        double v = f + rule.shifts[r][j];
        if (v >= 1.0) v -= 1.0;
        pt.unit[j] = clamp_unit(v);
        pt.gauss[j] = inverse_normal_cdf(pt.unit[j]);
    }
    return pt;
}

std::vector<std::uint64_t> load_generating_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::io, "cannot open generating vector file: " + path);
    std::vector<std::uint64_t> z;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const char* s = line.c_str();
        char* end = nullptr;
        errno = 0;
        unsigned long long v = std::strtoull(s, &end, 10);
        while (end && *end == ' ') ++end;
        if (end == s || (end && *end != '\0') || errno != 0 || v == 0)
            fail(ErrorKind::parse, path + ":" + std::to_string(lineno) +
                                       ": expected one positive integer per line");
        z.push_back(v);
    }
    if (z.empty())
        fail(ErrorKind::parse, path + ": empty generating vector file");
    return z;
}

double cbc_criterion(const std::vector<std::uint64_t>& z, std::uint64_t n) {
    if (n < 2 || z.empty())
        fail(ErrorKind::config, "criterion needs n >= 2 and a nonempty vector");
    const double two_pi2 = 2.0 * kPi * kPi;
    double sum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            double x = static_cast<double>((k * z[j]) % n) / static_cast<double>(n);
            double b2 = x * x - x + 1.0 / 6.0;
            double gamma = 1.0 / (static_cast<double>(j + 1) * static_cast<double>(j + 1));
            prod *= 1.0 + gamma * two_pi2 * b2;
        }
        sum += prod;
    }
    return -1.0 + sum / static_cast<double>(n);
}

std::vector<std::uint64_t> cbc_construct(std::uint64_t n, int s) {
    if (s < 1)
        fail(ErrorKind::config, "construction dimension must be at least 1");
    bool pow2 = n >= 2 && (n & (n - 1)) == 0;
    if (!pow2 && !is_prime(n))
        fail(ErrorKind::config,
             "lattice size must be prime or a power of two, got " + std::to_string(n));
    if (n >= (1ULL << 31))
        fail(ErrorKind::config, "lattice size too large for construction");

    const double two_pi2 = 2.0 * kPi * kPi;
    std::vector<double> btab(n); // 2*pi^2 * B2(k/n)
    for (std::uint64_t k = 0; k < n; ++k) {
        double x = static_cast<double>(k) / static_cast<double>(n);
        btab[k] = two_pi2 * (x * x - x + 1.0 / 6.0);
    }

    std::vector<std::uint64_t> candidates;
    for (std::uint64_t c = 1; c < n; ++c)
        if (pow2 ? (c % 2 == 1) : (c % n != 0))
            candidates.push_back(c);

    std::vector<std::uint64_t> z;
    std::vector<double> prod(n, 1.0); // running per-k product over chosen coords
    for (int j = 1; j <= s; ++j) {
        double gamma = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
        double best_e = std::numeric_limits<double>::infinity();
        std::uint64_t best_c = 0;
        for (std::uint64_t c : candidates) {
            double sum = 0.0;
            for (std::uint64_t k = 0; k < n; ++k)
                sum += prod[k] * (1.0 + gamma * btab[(k * c) % n]);
            double e = -1.0 + sum / static_cast<double>(n);
            if (e < best_e) { // ascending scan: strict < keeps the smallest tie
                best_e = e;
                best_c = c;
            }
        }
        z.push_back(best_c);
        for (std::uint64_t k = 0; k < n; ++k)
            prod[k] *= 1.0 + gamma * btab[(k * best_c) % n];
    }
    return z;
}

void dump_shifts_csv(std::ostream& os, const LatticeRule& rule) {
    os << "r,j,xi\n";
    char buf[64];
    for (std::size_t r = 0; r < rule.shifts.size(); ++r)
        for (int j = 0; j < rule.s; ++j) {
            std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g\n", r, j,
                          rule.shifts[r][j]);
            os << buf;
        }
}

} // namespace mlqmc

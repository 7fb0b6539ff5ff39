#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mlqmc {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
    input,     // bad argument / precondition violated
    parse,     // malformed file or config text
    config,    // inconsistent configuration
    numeric,   // solver or conditioning failure
    io,        // file system trouble
    validation // a requested validation check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

// Counter-based deterministic generator (SplitMix64 finalizer chain).
// Stateless: the value depends only on the seed and the counters, so any
// evaluation order or thread count produces the same stream.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t a, uint64_t b = 0,
                             uint64_t c = 0) {
    uint64_t h = mix64(seed);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Map a 64-bit hash to a uniform double strictly inside (0,1).
inline double uniform01(uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1p-53 + 0x1p-54;
}

// Decimal text with enough digits to round-trip an IEEE double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace mlqmc

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fdsim {

/// One splitmix64 step. Used to mix seed material.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from (master, tag, a, b). The tag
/// separates purposes ("channel", "partition", ...), a/b separate entities
/// within a purpose (client id, round, ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0);

/// mt19937_64 plus hand-rolled distributions. The standard distribution
/// classes are implementation-defined, so sampling through them would give
/// different streams on libstdc++ and libc++; these do not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal (Box-Muller, cached spare).
    double normal();
    double normal(double mean, double stddev);
    /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape);
    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fdsim

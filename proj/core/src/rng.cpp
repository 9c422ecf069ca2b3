#include "fdsim/rng.hpp"

#include <cmath>

#include "fdsim/error.hpp"

namespace fdsim {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t a, std::uint64_t b) {
    // FNV-1a over the tag, then splitmix over the numeric parts.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = mix64(master ^ h);
    s = mix64(s ^ a);
    s = mix64(s ^ (b + 0x632be59bd9b4e019ULL));
    return s;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    have_spare_ = true;
    return mag * std::cos(two_pi * u2);
}

double Rng::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) {
        throw InputError("gamma shape must be > 0");
    }
    if (shape < 1.0) {
        // Boost the shape, then scale back: G(a) = G(a+1) * U^{1/a}.
        const double g = gamma(shape + 1.0);
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw InputError("Rng::below requires n > 0");
    }
    const std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= bound);
    return x % n;
}

}  // namespace fdsim

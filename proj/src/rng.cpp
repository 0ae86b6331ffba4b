// rng.cpp — stream construction and portable samplers
#include "roqs/rng.hpp"

#include "roqs/types.hpp"

#include <cmath>

namespace roqs::ensembles {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                            std::uint64_t d) {
    std::uint64_t h = mix64(a);
    h = mix64(h ^ mix64(b + 0x100000001b3ULL));
    h = mix64(h ^ mix64(c + 0xcbf29ce484222325ULL));
    h = mix64(h ^ mix64(d + 0x9ae16a3b2f90404fULL));
    return h;
}

StreamRng::StreamRng(SeedSpec spec) : seed_(spec) {
    // expand the pair into engine state through the splitmix64 finalizer so
    // that nearby (seed, stream) pairs land in unrelated regions of state space
    std::uint64_t s = mix64(spec.master_seed ^ mix64(spec.stream_index));
    std::seed_seq seq{
        static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
        static_cast<std::uint32_t>(mix64(s)), static_cast<std::uint32_t>(mix64(s) >> 32),
        static_cast<std::uint32_t>(spec.master_seed),
        static_cast<std::uint32_t>(spec.master_seed >> 32),
        static_cast<std::uint32_t>(spec.stream_index),
        static_cast<std::uint32_t>(spec.stream_index >> 32)};
    engine_.seed(seq);
}

std::uint64_t StreamRng::raw() { return engine_(); }

double StreamRng::uniform() {
    // top 53 bits, mapped to (0, 1] so log(uniform()) is always finite
    return (static_cast<double>(engine_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

double StreamRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_normal_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_normal_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

double StreamRng::gamma(double shape) {
    if (!(shape > 0.0)) throw invalid_input("gamma: shape must be positive");
    // Marsaglia-Tsang squeeze; shapes below one are boosted and rescaled
    if (shape < 1.0) {
        double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double StreamRng::chi_squared(double nu) {
    if (!(nu > 0.0)) throw invalid_input("chi_squared: nu must be positive");
    return 2.0 * gamma(0.5 * nu);
}

}  // namespace roqs::ensembles

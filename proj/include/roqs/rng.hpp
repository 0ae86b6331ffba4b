// rng.hpp — seed-addressable random streams with portable sampling
//
// Every random object in the project is drawn from a StreamRng constructed
// from a (master_seed, stream_index) pair.  Identical pairs give bit-identical
// sequences on every platform: the engine is mt19937_64 (state pinned by the
// C++ standard) and the normal/gamma transforms are implemented here rather
// than taken from <random>, whose distributions are implementation-defined.
#pragma once

#include <cstdint>
#include <random>

namespace roqs::ensembles {

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

class StreamRng {
  public:
    explicit StreamRng(SeedSpec spec);

    std::uint64_t raw();        // full 64-bit word
    double uniform();           // (0, 1], 53-bit resolution
    double normal();            // standard normal, Box-Muller with cached spare
    double gamma(double shape); // Gamma(shape, 1), any shape > 0
    double chi_squared(double nu); // chi^2 with nu > 0 degrees of freedom

    SeedSpec seed() const { return seed_; }

  private:
    SeedSpec seed_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool have_spare_ = false;
};

// splitmix64 finalizer; used for stream derivation and content hashing
std::uint64_t mix64(std::uint64_t x);

// deterministic substream id from a tuple of labels (ensemble, realization, role, ...)
std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                            std::uint64_t d = 0);

}  // namespace roqs::ensembles

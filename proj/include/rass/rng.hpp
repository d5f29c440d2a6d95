#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace rass {

// Deterministic random layer. std::mt19937_64 is bit-exact across platforms;
// the distributions below replace the implementation-defined std:: ones so
// that seeded runs reproduce identically everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0,1) with 53-bit resolution
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n >= 1, unbiased via rejection
    std::uint64_t next_below(std::uint64_t n);

    // standard normal, Box-Muller
    double next_gaussian();

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stateless 64-bit mix used to derive per-window seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

} // namespace rass

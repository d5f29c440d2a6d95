#include "rass/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rass {

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("Rng::next_below: n must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t v = engine_();
    while (v >= limit)
        v = engine_();
    return v % n;
}

double Rng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = next_double();
    while (u1 <= 0.0)
        u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over seed xor golden-ratio-stepped salt
    std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0xbf58476d1ce4e5b9ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace rass

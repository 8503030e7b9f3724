#include "kan/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace kan {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    return splitmix64(x);
}

RngState::RngState(std::uint64_t seed) : seed0(seed) {
    std::uint64_t x = seed;
    for (auto& w : s) w = splitmix64(x);
}

std::uint64_t RngState::next_u64() {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double RngState::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngState::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    return next_u64() % n;
}

double RngState::normal() {
    if (has_spare) {
        has_spare = false;
        return spare;
    }
    // u1 in (0,1] so log(u1) is finite
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = kTwoPi * u2;
    spare = r * std::sin(theta);
    has_spare = true;
    return r * std::cos(theta);
}

bool RngState::bernoulli(double p) { return uniform() < p; }

double RngState::rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

RngState RngState::derive(std::uint64_t stream) const {
    return RngState(derive_seed(seed0, stream));
}

std::vector<double> sample_standard_normal(RngState& rng, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.normal();
    return out;
}

}  // namespace kan

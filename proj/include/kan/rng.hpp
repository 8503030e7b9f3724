#pragma once

#include <cstdint>
#include <vector>

namespace kan {

// Deterministic small-state generator: xoshiro256** seeded through splitmix64.
// The generator family is fixed for the lifetime of the project — every
// stochastic result in the repository (initialization, SGD shuffling, dropout
// masks, Rademacher signs, Monte-Carlo draws) is reproducible bit-for-bit
// from a 64-bit seed on any platform.
//
// Normal draws use the Box-Muller transform on (0,1] uniforms; the second
// value of each pair is cached, so normal() consumes exactly two 64-bit words
// per pair of draws.
struct RngState {
    std::uint64_t s[4];
    std::uint64_t seed0 = 0;  // seed the state was expanded from, kept for derive()
    bool has_spare = false;
    double spare = 0.0;

    explicit RngState(std::uint64_t seed);

    std::uint64_t next_u64();

    // uniform on [0,1) with 53 random bits
    double uniform();
    // uniform on [lo,hi)
    double uniform(double lo, double hi);
    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n);

    // standard normal via Box-Muller
    double normal();

    bool bernoulli(double p);

    // +1 or -1 with equal probability
    double rademacher();

    // Independent substream: a fresh generator keyed on (seed0, stream).
    // Parallel or logically-separate consumers must derive, never share state.
    RngState derive(std::uint64_t stream) const;
};

// Hash-combine a seed with a stream tag (splitmix64 mixing); used by
// RngState::derive and anywhere a file format records a derived seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// n iid N(0,1) draws. Consumes the generator in pairs (Box-Muller).
std::vector<double> sample_standard_normal(RngState& rng, std::size_t n);

}  // namespace kan

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace sra {

/// splitmix64 step; used to derive independent sub-stream seeds so that
/// results do not depend on how trials are distributed over workers.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for a named sub-stream of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = master;
    splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (a + 1);
    splitmix64(s);
    s ^= 0x8cb92ba72f3d8dd7ULL * (b + 1);
    splitmix64(s);
    s ^= 0xaef17502108ef2d9ULL * (c + 1);
    return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Circular complex Gaussian sample with E|z|^2 = variance.
inline std::complex<double> complex_gaussian(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

} // namespace sra

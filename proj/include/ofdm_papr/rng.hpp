#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace ofdm_papr {

inline std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent stream per (seed, purpose, index), so results never depend on
// how symbols are distributed across workers.
inline std::mt19937_64 symbol_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
{
    const std::uint64_t a = splitmix64(seed ^ splitmix64(purpose + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(splitmix64(a ^ index)),
                      static_cast<std::uint32_t>(splitmix64(a ^ index) >> 32)};
    return std::mt19937_64(seq);
}

namespace stream {
inline constexpr std::uint64_t bits = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t misc = 3;
} // namespace stream

inline std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, std::size_t n)
{
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; i += 64) {
        std::uint64_t word = rng();
        for (std::size_t j = i; j < std::min(n, i + 64); ++j, word >>= 1) bits[j] = word & 1u;
    }
    return bits;
}

// Circular complex Gaussian with E|n|^2 = variance.
inline std::complex<double> complex_gaussian(std::mt19937_64& rng, double variance)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

} // namespace ofdm_papr

#pragma once

#include <cstdint>
#include <random>

namespace fairport {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent child seeds from a
// master seed and an index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index = 0) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform on the open interval (0,1), built from the top 53 bits so the
// stream is identical on every standard library.
inline double uniform_open01(Rng& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace fairport

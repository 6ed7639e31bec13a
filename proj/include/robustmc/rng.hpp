#pragma once

#include <cstdint>

namespace robustmc {

// Counter-based random stream. Every draw is a pure function of
// (seed, path index, step counter), so parallel scheduling of paths can
// never change the sampled values.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t counter) {
    std::uint64_t z = mix64(seed);
    z = mix64(z ^ (path + 0x632be59bd9b4e019ULL));
    z = mix64(z ^ (counter + 0x9e6c63d0876a9ecdULL));
    return z;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t path, std::uint64_t counter) {
    return static_cast<double>(counter_hash(seed, path, counter) >> 11) * 0x1.0p-53;
}

}  // namespace robustmc

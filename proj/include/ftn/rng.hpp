#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ftn {

// Finalizer of the splitmix64 generator.  Used to derive well-separated
// child seeds from (master seed, stream index) pairs so that Monte-Carlo
// blocks can run in any order, on any number of threads, and still draw
// from the same per-block streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ull));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(derive_seed(master, index));
}

// Uniform double in (0, 1); strictly positive so it is safe under log().
inline double uniform_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

// One Box-Muller pair of independent standard normals.  Hand-rolled instead
// of std::normal_distribution so that streams are identical across standard
// library implementations, which the reproducibility contract relies on.
struct GaussianPair {
    double z0;
    double z1;
};

inline GaussianPair gaussian_pair(std::mt19937_64& rng) {
    const double u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace ftn

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace aerocf {

/// Purpose tags mixed into stream keys so that independent consumers of the
/// same root seed never share a sub-stream.
namespace stream_tag {
inline constexpr std::uint64_t user_drop = 1;
inline constexpr std::uint64_t access_channel = 2;
inline constexpr std::uint64_t symbols = 3;
inline constexpr std::uint64_t uxnb_noise = 4;
inline constexpr std::uint64_t haps_noise = 5;
inline constexpr std::uint64_t reemission_phase = 6;
inline constexpr std::uint64_t experiment_item = 7;
inline constexpr std::uint64_t test_instance = 8;
}  // namespace stream_tag

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based stream key: hashes the root seed with an ordered key tuple,
/// e.g. {tag, trial, k, m}. Equal tuples give equal streams regardless of the
/// order in which streams are requested.
std::uint64_t derive_stream_seed(std::uint64_t root, std::initializer_list<std::uint64_t> key) noexcept;

inline std::mt19937_64 make_engine(std::uint64_t root, std::initializer_list<std::uint64_t> key) {
    return std::mt19937_64(derive_stream_seed(root, key));
}

/// Circularly-symmetric complex Gaussian CN(0, variance).
template <class Engine>
std::complex<double> complex_normal(Engine& engine, double variance = 1.0) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double scale = std::sqrt(0.5 * variance);
    const double re = n(engine);
    const double im = n(engine);
    return {scale * re, scale * im};
}

/// Uniform phase on [0, 2 pi).
template <class Engine>
double uniform_phase(Engine& engine) {
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586476925286766559);
    return u(engine);
}

}  // namespace aerocf

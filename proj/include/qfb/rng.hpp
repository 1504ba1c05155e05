#pragma once
// Counter-based random number generation (Philox4x32-10) and standard
// normal draws derived from it.
//
// Every output is a pure function of (seed, stream, index), so parallel
// consumers get bit-identical results regardless of how work is chunked
// across threads. Normals use the trigonometric Box-Muller transform,
// which consumes a fixed number of counter blocks per pair (rejection
// samplers would not).
//
// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.

#include <cmath>
#include <cstdint>

namespace qfb {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) noexcept {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace detail

struct PhiloxBlock {
    std::uint32_t v[4];
};

// One 128-bit block of the philox4x32-10 keyed permutation.
inline PhiloxBlock philox4x32(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                              std::uint32_t c3, std::uint32_t k0,
                              std::uint32_t k1) noexcept {
    std::uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo32(detail::kPhiloxM0, x0, hi0, lo0);
        detail::mulhilo32(detail::kPhiloxM1, x2, hi1, lo1);
        const std::uint32_t y0 = hi1 ^ x1 ^ k0;
        const std::uint32_t y1 = lo1;
        const std::uint32_t y2 = hi0 ^ x3 ^ k1;
        const std::uint32_t y3 = lo0;
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
        k0 += detail::kPhiloxW0;
        k1 += detail::kPhiloxW1;
    }
    return PhiloxBlock{{x0, x1, x2, x3}};
}

// Domain tags keep independent uses of the generator on disjoint streams.
enum class RngDomain : std::uint32_t {
    qf_draws = 0x1u,
    power_iteration = 0x2u,
    generic = 0x3u,
};

// Block (index, block) of the stream identified by (seed, domain).
inline PhiloxBlock philox_block(std::uint64_t seed, RngDomain domain,
                                std::uint64_t index, std::uint32_t block) noexcept {
    return philox4x32(static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), block,
                      static_cast<std::uint32_t>(domain),
                      static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32));
}

namespace detail {

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) noexcept {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// 53-bit uniform on (0, 1]; never 0 so log() below is safe.
inline double u01_open(std::uint64_t bits) noexcept {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// 53-bit uniform on [0, 1).
inline double u01_halfopen(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Two independent N(0,1) variates from one counter block.
inline void normal_pair(std::uint64_t seed, RngDomain domain, std::uint64_t index,
                        std::uint32_t block, double& n0, double& n1) noexcept {
    const PhiloxBlock b = philox_block(seed, domain, index, block);
    const double u1 = detail::u01_open(detail::join64(b.v[0], b.v[1]));
    const double u2 = detail::u01_halfopen(detail::join64(b.v[2], b.v[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    n0 = r * std::cos(theta);
    n1 = r * std::sin(theta);
}

// Uniform on [0, 1) at (index, block) of a stream.
inline double uniform01(std::uint64_t seed, RngDomain domain, std::uint64_t index,
                        std::uint32_t block) noexcept {
    const PhiloxBlock b = philox_block(seed, domain, index, block);
    return detail::u01_halfopen(detail::join64(b.v[0], b.v[1]));
}

inline constexpr const char* kGeneratorName = "philox4x32-10";

}  // namespace qfb

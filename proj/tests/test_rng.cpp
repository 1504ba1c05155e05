#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "qfb/rng.hpp"

using namespace qfb;

TEST_CASE("philox4x32-10 matches the reference known-answer vectors") {
    // Salmon et al. kat_vectors, philox4x32 with 10 rounds.
    const PhiloxBlock a = philox4x32(0, 0, 0, 0, 0, 0);
    CHECK(a.v[0] == 0x6627e8d5u);
    CHECK(a.v[1] == 0xe169c58du);
    CHECK(a.v[2] == 0xbc57ac4cu);
    CHECK(a.v[3] == 0x9b00dbd8u);

    const PhiloxBlock b = philox4x32(0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu,
                                     0xffffffffu, 0xffffffffu);
    CHECK(b.v[0] == 0x408f276du);
    CHECK(b.v[1] == 0x41c83b0eu);
    CHECK(b.v[2] == 0xa20bc7c6u);
    CHECK(b.v[3] == 0x6d5451fdu);

    const PhiloxBlock c = philox4x32(0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u,
                                     0xa4093822u, 0x299f31d0u);
    CHECK(c.v[0] == 0xd16cfe09u);
    CHECK(c.v[1] == 0x94fdccebu);
    CHECK(c.v[2] == 0x5001e420u);
    CHECK(c.v[3] == 0x24126ea1u);
}

TEST_CASE("normal_pair is a pure function of (seed, domain, index, block)") {
    double a0, a1, b0, b1;
    normal_pair(123, RngDomain::qf_draws, 77, 3, a0, a1);
    normal_pair(123, RngDomain::qf_draws, 77, 3, b0, b1);
    CHECK(a0 == b0);
    CHECK(a1 == b1);

    normal_pair(123, RngDomain::power_iteration, 77, 3, b0, b1);
    CHECK(a0 != b0);  // distinct domains give distinct streams

    normal_pair(124, RngDomain::qf_draws, 77, 3, b0, b1);
    CHECK(a0 != b0);
}

TEST_CASE("normal draws have standard moments") {
    const std::int64_t pairs = 500000;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
    for (std::int64_t i = 0; i < pairs; ++i) {
        double z0, z1;
        normal_pair(2024, RngDomain::generic, static_cast<std::uint64_t>(i), 0, z0, z1);
        sum += z0 + z1;
        sum2 += z0 * z0 + z1 * z1;
        sum3 += z0 * z0 * z0 + z1 * z1 * z1;
    }
    const double n = 2.0 * static_cast<double>(pairs);
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double skew = sum3 / n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));            // se of the mean is 1/sqrt(n)
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));  // se of the variance
    CHECK(std::abs(skew) < 4.0 * std::sqrt(15.0 / n));      // E[Z^6] = 15
}

TEST_CASE("uniform01 stays in [0, 1) and is deterministic") {
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform01(9, RngDomain::generic, static_cast<std::uint64_t>(i), 1);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(uniform01(9, RngDomain::generic, 5, 1) == uniform01(9, RngDomain::generic, 5, 1));
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvfp/rng.hpp"

using namespace cvfp;

TEST_SUITE("rng") {

// Known-answer vectors of the Philox-4x32-10 reference implementation.
TEST_CASE("philox known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                     A2{0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                     A2{0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are pure functions of seed, stream and counter") {
    RngStream a(7, 3), b(7, 3);
    for (int k = 0; k < 100; ++k) CHECK(a.normal() == b.normal());
    RngStream c(7, 4);
    RngStream d(7, 3);
    int same = 0;
    for (int k = 0; k < 100; ++k) same += c.uniform() == d.uniform();
    CHECK(same == 0);
    // restarting at a block counter reproduces the tail of the sequence
    RngStream e(9, 1);
    for (int k = 0; k < 6; ++k) (void)e.uniform();
    CHECK(e.counter() == 3);
    RngStream f(9, 1, 3);
    CHECK(e.uniform() == f.uniform());
}

TEST_CASE("uniform lies in the open unit interval") {
    RngStream r(1, 0);
    for (int k = 0; k < 100000; ++k) {
        const double u = r.uniform();
        CHECK_UNARY(u > 0.0);
        CHECK_UNARY(u < 1.0);
    }
}

TEST_CASE("normal moments") {
    RngStream r(2, 0);
    constexpr int n = 400000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int k = 0; k < n; ++k) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
        s3 += z * z * z;
        s4 += z * z * z * z;
    }
    s1 /= n;
    s2 /= n;
    s3 /= n;
    s4 /= n;
    // 5 standard errors of each sample moment
    CHECK(std::abs(s1) < 5.0 * std::sqrt(1.0 / n));
    CHECK(std::abs(s2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s3) < 5.0 * std::sqrt(15.0 / n));
    CHECK(std::abs(s4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

}

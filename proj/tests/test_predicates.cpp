#include "doctest.h"

#include <cmath>

#include "sieve/predicates.hpp"

using namespace sieve;

TEST_CASE("orientation signs") {
    CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) > 0);
    CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) < 0);
    CHECK(orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
}

TEST_CASE("orientation is exact for nearly collinear points") {
    // Points on the line y = x perturbed by one ulp; naive evaluation loses the sign.
    double a = 0.5;
    for (int i = 0; i < 64; ++i) {
        Vec2 p{a, a};
        Vec2 q{12.0, 12.0};
        Vec2 r{24.0, 24.0};
        CHECK(orient2d(p, q, r) == 0);
        Vec2 rp{24.0, std::nextafter(24.0, 25.0)};
        CHECK(orient2d(p, q, rp) > 0);
        a = std::nextafter(a, 1.0);
    }
}

TEST_CASE("orientation is invariant under cyclic permutation") {
    Vec2 a{0.1, 0.3}, b{0.7, 0.11}, c{1e-17, 0.3 + 1e-17};
    int s = orient2d(a, b, c);
    CHECK(orient2d(b, c, a) == s);
    CHECK(orient2d(c, a, b) == s);
    CHECK(orient2d(b, a, c) == -s);
}

TEST_CASE("incircle") {
    Vec2 a{0, 0}, b{1, 0}, c{0, 1};
    CHECK(incircle(a, b, c, {0.5, 0.5}) > 0);
    CHECK(incircle(a, b, c, {2, 2}) < 0);
    CHECK(incircle(a, b, c, {1, 1}) == 0);   // cocircular
}

TEST_CASE("circumcenter and segment crossing") {
    Vec2 cc = circumcenter({0, 0}, {2, 0}, {0, 2});
    CHECK(cc.x == doctest::Approx(1.0));
    CHECK(cc.y == doctest::Approx(1.0));
    CHECK(segments_cross({0, 0}, {1, 1}, {0, 1}, {1, 0}));
    CHECK_FALSE(segments_cross({0, 0}, {1, 1}, {1, 1}, {2, 0}));   // shared endpoint
    CHECK_FALSE(segments_cross({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    CHECK(point_segment_distance({0.5, 1.0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(point_segment_distance({2.0, 0.0}, {0, 0}, {1, 0}) == doctest::Approx(1.0));
}

#pragma once

#include "sieve/vec2.hpp"

namespace sieve {

// Sign-exact geometric predicates. A floating-point filter answers most calls;
// ambiguous cases are re-evaluated in rational arithmetic.

// > 0 when (a, b, c) is counter-clockwise, < 0 clockwise, 0 collinear.
int orient2d(Vec2 a, Vec2 b, Vec2 c);

// > 0 when d lies strictly inside the circle through the counter-clockwise triangle (a, b, c).
int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// Floating-point determinant values (not sign-exact), used for magnitudes only.
double orient2d_value(Vec2 a, Vec2 b, Vec2 c);

// Circumcenter of a non-degenerate triangle.
Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);

// True when the closed segments [a,b] and [c,d] properly cross (interiors meet in one point).
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace sieve

#pragma once

#include <array>
#include <functional>

#include "sieve/geometry.hpp"
#include "sieve/vec2.hpp"

namespace sieve {

// Affine function c + g . (p - o), stored relative to an origin for accuracy.
struct Affine {
    Vec2 origin;
    double c = 0.0;
    Vec2 g;
    double operator()(Vec2 p) const { return c + dot(g, p - origin); }
};

// Interpolant of nodal values on the triangle (a, b, c).
Affine affine_from_triangle(Vec2 a, Vec2 b, Vec2 c, double fa, double fb, double fc);

double polygon_signed_area(const Polygon& poly);

// Sutherland-Hodgman clipping of `subject` against the convex counter-clockwise polygon `clip`.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

// Exact integrals over a convex polygon (fan triangulation, edge-midpoint rule).
double integrate_affine(const Polygon& convex, const Affine& f);
double integrate_affine_product(const Polygon& convex, const Affine& f, const Affine& g);

// Degree-5 seven-point rule on triangles, applied to the fan of a convex polygon.
double integrate_function(const Polygon& convex, const std::function<double(Vec2)>& f);

struct TriangleQuadPoint {
    double l1, l2, l3, weight;  // barycentric coordinates; weights sum to 1
};
const std::array<TriangleQuadPoint, 7>& triangle_rule();

Polygon rectangle(double x0, double y0, double x1, double y1);

}  // namespace sieve

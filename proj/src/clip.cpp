#include "sieve/clip.hpp"

#include <cmath>

namespace sieve {

Affine affine_from_triangle(Vec2 a, Vec2 b, Vec2 c, double fa, double fb, double fc) {
    Vec2 e1 = b - a, e2 = c - a;
    double det = cross(e1, e2);
    double d1 = fb - fa, d2 = fc - fa;
    Affine f;
    f.origin = a;
    f.c = fa;
    f.g = {(d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det};
    return f;
}

double polygon_signed_area(const Polygon& poly) {
    double s = 0.0;
    if (poly.size() < 3) return 0.0;
    Vec2 o = poly[0];
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) s += cross(poly[i] - o, poly[i + 1] - o);
    return 0.5 * s;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
    Polygon out = subject;
    const std::size_t m = clip.size();
    for (std::size_t e = 0; e < m && !out.empty(); ++e) {
        Vec2 a = clip[e], b = clip[(e + 1) % m];
        Vec2 d = b - a;
        Polygon in = std::move(out);
        out.clear();
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 p = in[i], q = in[(i + 1) % n];
            double sp = cross(d, p - a), sq = cross(d, q - a);
            bool pin = sp >= 0.0, qin = sq >= 0.0;
            if (pin) out.push_back(p);
            if (pin != qin) {
                double t = sp / (sp - sq);
                out.push_back(p + t * (q - p));
            }
        }
    }
    if (out.size() < 3) out.clear();
    return out;
}

double integrate_affine(const Polygon& poly, const Affine& f) {
    double s = 0.0;
    if (poly.size() < 3) return 0.0;
    Vec2 o = poly[0];
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        double area = 0.5 * cross(poly[i] - o, poly[i + 1] - o);
        s += area * f((1.0 / 3.0) * (o + poly[i] + poly[i + 1]));
    }
    return s;
}

double integrate_affine_product(const Polygon& poly, const Affine& f, const Affine& g) {
    double s = 0.0;
    if (poly.size() < 3) return 0.0;
    Vec2 o = poly[0];
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        Vec2 a = o, b = poly[i], c = poly[i + 1];
        double area = 0.5 * cross(b - a, c - a);
        Vec2 m1 = 0.5 * (a + b), m2 = 0.5 * (b + c), m3 = 0.5 * (c + a);
        s += area / 3.0 * (f(m1) * g(m1) + f(m2) * g(m2) + f(m3) * g(m3));
    }
    return s;
}

const std::array<TriangleQuadPoint, 7>& triangle_rule() {
    static const std::array<TriangleQuadPoint, 7> rule = [] {
        const double a1 = 0.059715871789770, b1 = 0.470142064105115;
        const double a2 = 0.797426985353087, b2 = 0.101286507323456;
        const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
        return std::array<TriangleQuadPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, w0},
                                                 {a1, b1, b1, w1},
                                                 {b1, a1, b1, w1},
                                                 {b1, b1, a1, w1},
                                                 {a2, b2, b2, w2},
                                                 {b2, a2, b2, w2},
                                                 {b2, b2, a2, w2}}};
    }();
    return rule;
}

double integrate_function(const Polygon& poly, const std::function<double(Vec2)>& f) {
    double s = 0.0;
    if (poly.size() < 3) return 0.0;
    Vec2 o = poly[0];
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        Vec2 a = o, b = poly[i], c = poly[i + 1];
        double area = 0.5 * cross(b - a, c - a);
        double t = 0.0;
        for (const auto& q : triangle_rule()) t += q.weight * f(q.l1 * a + q.l2 * b + q.l3 * c);
        s += area * t;
    }
    return s;
}

Polygon rectangle(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

}  // namespace sieve

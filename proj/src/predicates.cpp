#include "sieve/predicates.hpp"

#include <cmath>
#include <gmpxx.h>

namespace sieve {

namespace {

constexpr double kOrientBound = 3.3306690738754716e-16;
constexpr double kIncircleBound = 1.1102230246251577e-15;

int sign_of(const mpq_class& q) { return sgn(q); }

int orient_exact(Vec2 a, Vec2 b, Vec2 c) {
    mpq_class acx = mpq_class(a.x) - mpq_class(c.x);
    mpq_class bcx = mpq_class(b.x) - mpq_class(c.x);
    mpq_class acy = mpq_class(a.y) - mpq_class(c.y);
    mpq_class bcy = mpq_class(b.y) - mpq_class(c.y);
    mpq_class det = acx * bcy - acy * bcx;
    return sign_of(det);
}

int incircle_exact(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    mpq_class dx(d.x), dy(d.y);
    mpq_class adx = mpq_class(a.x) - dx, ady = mpq_class(a.y) - dy;
    mpq_class bdx = mpq_class(b.x) - dx, bdy = mpq_class(b.y) - dy;
    mpq_class cdx = mpq_class(c.x) - dx, cdy = mpq_class(c.y) - dy;
    mpq_class alift = adx * adx + ady * ady;
    mpq_class blift = bdx * bdx + bdy * bdy;
    mpq_class clift = cdx * cdx + cdy * cdy;
    mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

}  // namespace

double orient2d_value(Vec2 a, Vec2 b, Vec2 c) {
    return (a.x - c.x) * (b.y - c.y) - (a.y - c.y) * (b.x - c.x);
}

int orient2d(Vec2 a, Vec2 b, Vec2 c) {
    double l = (a.x - c.x) * (b.y - c.y);
    double r = (a.y - c.y) * (b.x - c.x);
    double det = l - r;
    double bound = kOrientBound * (std::abs(l) + std::abs(r));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return orient_exact(a, b, c);
}

int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    double adx = a.x - d.x, ady = a.y - d.y;
    double bdx = b.x - d.x, bdy = b.y - d.y;
    double cdx = c.x - d.x, cdy = c.y - d.y;
    double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    double cdxady = cdx * ady, adxcdy = adx * cdy;
    double adxbdy = adx * bdy, bdxady = bdx * ady;
    double alift = adx * adx + ady * ady;
    double blift = bdx * bdx + bdy * bdy;
    double clift = cdx * cdx + cdy * cdy;
    double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    double perm = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift + (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                  (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    double bound = kIncircleBound * perm;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return incircle_exact(a, b, c, d);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    // Offsets relative to a keep the cancellation local.
    double bx = b.x - a.x, by = b.y - a.y;
    double cx = c.x - a.x, cy = c.y - a.y;
    double d = 2.0 * (bx * cy - by * cx);
    double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    double ux = (cy * b2 - by * c2) / d;
    double uy = (bx * c2 - cx * b2) / d;
    return {a.x + ux, a.y + uy};
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
    int o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace sieve

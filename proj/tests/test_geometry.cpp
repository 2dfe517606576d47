#include "doctest.h"

#include <cmath>
#include <limits>

#include "sieve/clip.hpp"
#include "sieve/config.hpp"
#include "sieve/geometry.hpp"

using namespace sieve;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

SieveSpec single_straight(double eps, double d, double rho) {
    SieveSpec s;
    s.eps = eps;
    s.lateral = Lateral::Neumann;
    Passage p;
    p.center = 0.0;
    p.shape = PassageShape::straight(d);
    p.rho = rho;
    s.passages.push_back(p);
    return s;
}

bool has_constraint(const std::vector<Violation>& v, const std::string& name) {
    for (const auto& x : v)
        if (x.constraint == name) return true;
    return false;
}
}  // namespace

TEST_CASE("periodic family reproduces p and q") {
    for (double rho : {0.2, 0.1, 0.05}) {
        auto s = periodic_family(1.0, kInf, rho, 2);
        CHECK(s->passages.size() == static_cast<std::size_t>(std::lround(1.0 / rho)));
        double d = std::exp(-1.0 / rho);
        CHECK(s->passages[0].shape.d == doctest::Approx(d).epsilon(1e-14));
        CHECK(s->eps == doctest::Approx(d).epsilon(1e-14));
        CHECK(s->passages[0].rho == doctest::Approx(rho / 2));
        auto r = scale_report(s, 0.0, 0.0);
        CHECK(r.p == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Finite q: eps = d / (q rho).
    auto s = periodic_family(1.0, 2.0, 0.1, 2);
    CHECK(s->eps == doctest::Approx(std::exp(-10.0) / 0.2).epsilon(1e-12));
    auto r = scale_report(s, 0.0, 0.0);
    CHECK(r.q == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("periodic family rejects periods that do not tile the strip") {
    CHECK_THROWS_AS(periodic_family(1.0, kInf, 0.3, 2), Error);
}

TEST_CASE("admissibility constraints are reported by name") {
    CHECK(check_spec(single_straight(0.01, 0.001, 0.1)).empty());
    CHECK(has_constraint(check_spec(single_straight(0.2, 0.001, 0.1)), "eps_le_L_over_8"));
    CHECK(has_constraint(check_spec(single_straight(0.01, 0.05, 0.1)), "d_over_rho_le_quarter"));
    CHECK(has_constraint(check_spec(single_straight(0.01, 0.02, 0.1)), "log_ratio_le_half"));
    CHECK(has_constraint(check_spec(single_straight(0.01, 0.0, 0.1)), "positive_width"));

    SieveSpec two = single_straight(0.01, 0.001, 0.1);
    Passage q = two.passages[0];
    q.center = 0.15;
    two.passages.push_back(q);
    auto v = check_spec(two);
    REQUIRE(has_constraint(v, "guards_disjoint"));
    CHECK(v.back().kind == ErrorKind::GuardOverlap);

    try {
        validate_spec(single_straight(0.2, 0.001, 0.1));
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Eps0Violated);
    }
}

TEST_CASE("touching guard balls are admissible") {
    SieveSpec s = single_straight(0.001, 0.001, 0.1);
    Passage q = s.passages[0];
    q.center = 0.2;
    s.passages.push_back(q);
    CHECK(check_spec(s).empty());
}

TEST_CASE("passage outlines and areas") {
    double eps = 0.01, d = 0.002;
    Passage p;
    p.shape = PassageShape::straight(d);
    p.rho = 0.05;
    CHECK(passage_area(p, eps) == doctest::Approx(2 * d * 2 * eps));
    CHECK(face_radius(p, eps, +1) == doctest::Approx(d));
    Vec2 g = guard_center(p, eps, -1);
    CHECK(g.y == doctest::Approx(-eps));

    // Hourglass: two trapezoids with mouth 2*mouth and waist 2*waist, each of height eps.
    Passage h;
    h.shape = PassageShape::hourglass(0.004, 0.001);
    h.rho = 0.05;
    CHECK(passage_area(h, eps) == doctest::Approx(2 * eps * (0.004 + 0.001)));

    // Varying width profiles integrate to the area exactly.
    Passage v;
    v.shape = PassageShape::varying(tent_profile(eps, 0.002, 0.001), constant_profile(eps, 0.003));
    v.rho = 0.05;
    double exact = 2 * eps * (0.002 + 0.001) / 2 + 2 * eps * 0.003;
    CHECK(passage_area(v, eps) == doctest::Approx(exact));
}

TEST_CASE("profile helpers") {
    Profile t = tent_profile(1.0, 2.0, 1.0);
    CHECK(t(0.5) == doctest::Approx(1.5));
    CHECK(t.max_value() == 2.0);
    CHECK(t.min_value() == 1.0);
    CHECK(t.max_slope() == doctest::Approx(1.0));
    CHECK(parse_shape("hourglass") == ShapeKind::Hourglass);
    CHECK(std::string(shape_name(ShapeKind::BumpedRect)).size() > 0);
}

TEST_CASE("cells partition the strip") {
    auto s = periodic_family(1.0, kInf, 0.2, 2);
    auto dp = build_cells(s);
    REQUIRE(dp.cells.size() == 5);
    double wall = 0.0;
    for (const auto& w : dp.sieve_pieces) wall += std::abs(polygon_signed_area(w));
    double passages = 0.0;
    for (const auto& c : dp.cells) passages += c.area_T;
    double omega_eps = 0.0;
    for (const auto& comp : dp.omega_eps) {
        omega_eps += std::abs(polygon_signed_area(comp.outer));
        for (const auto& hole : comp.holes) omega_eps -= std::abs(polygon_signed_area(hole));
    }
    // Omega_eps plus the solid wall equals the strip.
    CHECK(omega_eps + wall == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(wall == doctest::Approx(2 * s->eps * (1.0 - 5 * 2 * s->passages[0].shape.d)).epsilon(1e-9));
    for (const auto& c : dp.cells) {
        CHECK(c.boundary.size() == c.edge_marker.size());
        CHECK(polygon_signed_area(c.boundary) > 0.0);
    }
}

TEST_CASE("scale report combines the rates") {
    auto s = periodic_family(1.0, kInf, 0.1, 2);
    auto r = scale_report(s, 0.3, 0.01);
    CHECK(r.sqrt_eps == doctest::Approx(std::sqrt(s->eps)));
    CHECK(r.chi == doctest::Approx(std::min(r.eta, std::sqrt(r.rho))));
    CHECK(r.sigma == doctest::Approx(std::max({r.sqrt_eps, 0.3, 0.01, r.chi})));
    CHECK(capacity_scale_function(std::exp(-2.0), 2) == doctest::Approx(2.0));
    CHECK(capacity_scale_function(0.5, 3) == doctest::Approx(2.0));
}

TEST_CASE("spec from configuration") {
    auto fam = spec_from_config(Config::parse("family.p = 1\nfamily.q = inf\nfamily.rho = 0.1\n"));
    CHECK(fam.passages.size() == 10);
    auto one = spec_from_config(Config::parse(
        "domain.eps = 0.01\ndomain.lateral = neumann\npassages.count = 1\n"
        "passage.0.center = 0\npassage.0.rho = 0.1\npassage.0.shape = straight\npassage.0.d = 0.001\n"));
    REQUIRE(one.passages.size() == 1);
    CHECK(one.lateral == Lateral::Neumann);
    CHECK(one.passages[0].shape.d == doctest::Approx(0.001));
    CHECK(check_spec(one).empty());
}

TEST_CASE("convex clipping and exact integration") {
    Polygon sq = rectangle(0, 0, 1, 1);
    Polygon tri = {{0.5, -1}, {2, 0.5}, {0.5, 2}};
    Polygon c = clip_convex(tri, sq);
    CHECK(polygon_signed_area(c) > 0.0);
    CHECK(polygon_signed_area(sq) == doctest::Approx(1.0));
    Affine f{{0, 0}, 1.0, {2.0, 3.0}};   // 1 + 2x + 3y
    CHECK(integrate_affine(sq, f) == doctest::Approx(1 + 1 + 1.5));
    CHECK(integrate_affine_product(sq, f, f) ==
          doctest::Approx(integrate_function(sq, [&](Vec2 p) { return f(p) * f(p); })));
    // x^4 y is integrated exactly by the degree-5 rule: 1/5 * 1/2.
    CHECK(integrate_function(sq, [](Vec2 p) { return std::pow(p.x, 4) * p.y; }) == doctest::Approx(0.1));
}

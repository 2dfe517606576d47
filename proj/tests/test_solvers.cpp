#include "doctest.h"

#include <cmath>
#include <limits>

#include "sieve/capacity.hpp"
#include "sieve/domain.hpp"
#include "sieve/fem.hpp"
#include "sieve/solvers.hpp"

using namespace sieve;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("source catalog norms") {
    CHECK(make_source("constant", 0.5, 1.0, 3.0).l2_norm() == doctest::Approx(3.0 * std::sqrt(2.0)));
    CHECK(make_source("upper", 0.5, 1.0).l2_norm() == doctest::Approx(1.0));
    CHECK(make_source("sign", 0.5, 1.0).l2_norm() == doctest::Approx(std::sqrt(2.0)));
    // int (cos(pi x/W) + sin(pi y/2L))^2 = 2WL + 2WL.
    CHECK(make_source("trig", 0.5, 1.0).l2_norm() == doctest::Approx(std::sqrt(2.0)));
    CHECK(make_source("zero", 0.5, 1.0).l2_norm() == 0.0);
    auto s = make_source("upper", 0.5, 1.0);
    CHECK(s({0.1, 0.2}) == 1.0);
    CHECK(s({0.1, -0.2}) == 0.0);
    CHECK_THROWS_AS(make_source("bogus", 0.5, 1.0), Error);
}

TEST_CASE("homogenized problem against the one-dimensional solution") {
    // f = 1 above Gamma on (-H, H), Neumann ends: [u](0) = 1 + 2A cosh H, A = -mu / (sinh H + 2 mu cosh H).
    const double H = 1.0, mu = M_PI / 2;
    Mesh hm = mesh_homogenized(0.5, H, Lateral::Periodic, 0.05);
    auto src = make_source("upper", 0.5, H);
    HomogenizedOptions o;
    o.solver.rel_tol = 1e-12;
    auto s = solve_homogenized(hm, mu, src.as_region_function(), o);
    double A = -mu / (std::sinh(H) + 2 * mu * std::cosh(H));
    double exact = 1 + 2 * A * std::cosh(H);
    REQUIRE(!s.jump.empty());
    double err = 0.0;
    for (const auto& j : s.jump) err = std::max(err, std::abs(j.jump - exact));
    CHECK(err <= 2e-3 * std::abs(exact));
    CHECK(s.flux_defect_plus < 0.05);
    CHECK(s.flux_defect_minus < 0.05);
}

TEST_CASE("constant sources give constant solutions") {
    auto spec = periodic_family(1.0, kInf, 0.2, 2);
    DomainMeshOptions mo;
    mo.h = 0.1;
    Mesh P = mesh_perforated(spec, mo);
    SolverOptions so;
    so.rel_tol = 1e-12;
    auto c = make_source("constant", 0.5, 1.0, 2.0);
    auto up = solve_perforated(P, c.as_region_function(), so);
    for (double v : up.u) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
    Mesh H = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.1);
    HomogenizedOptions ho;
    ho.solver = so;
    auto uh = solve_homogenized(H, M_PI / 2, c.as_region_function(), ho);
    for (double v : uh.u) CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("supermesh transfers are exact") {
    auto spec = periodic_family(1.0, kInf, 0.2, 2);
    DomainMeshOptions mo;
    mo.h = 0.1;
    Mesh P = mesh_perforated(spec, mo);
    Mesh H = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.1);
    Supermesh S(P, H);
    CHECK(S.covered_area() == doctest::Approx(P.area()).epsilon(1e-12));
    // The same affine function on both meshes has zero difference (the interface does not matter).
    auto lin = [](Vec2 p) { return 1.0 + 0.3 * p.x - 0.7 * p.y; };
    auto a = interpolate(P, lin), b = interpolate(H, lin);
    auto d = S.difference(a, nullptr, b);
    CHECK(d.l2_sq <= 1e-24);
    CHECK(d.h1_semi_sq <= 1e-22);
    // Against zero: the L2 norm of the affine function over Omega_eps.
    auto d0 = S.difference(a, nullptr, {});
    auto sys = assemble(P);
    CHECK(d0.l2_sq == doctest::Approx(sys.M.quadratic_form(a)).epsilon(1e-12));
    auto z = extend_by_zero(S, a);
    CHECK(z.l2 == doctest::Approx(z.perforated_l2).epsilon(1e-12));
    // J_eps of an affine field reproduces it per corner.
    auto J = restrict_to_perforated(H, b, P);
    double err = 0.0;
    for (std::size_t t = 0; t < P.num_tris(); ++t)
        for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(J.corner[t][k] - lin(P.nodes[P.tris[t][k]])));
    CHECK(err <= 1e-12);
    // Wall integral of 1 over the sieve pieces equals their area.
    auto dp = build_cells(spec);
    std::vector<double> one(H.num_nodes(), 1.0);
    double wall = 2.0 - P.area();
    CHECK(l2_sq_over_polygons(H, one, dp.sieve_pieces) == doctest::Approx(wall).epsilon(1e-10));
}

TEST_CASE("prolongation onto a refinement is exact for affine fields") {
    Mesh H = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.2);
    Mesh Hf = refine_uniform(H);
    auto lin = [](Vec2 p) { return 2.0 - p.x + 5.0 * p.y; };
    auto fine = prolongate(H, Hf, interpolate(H, lin));
    for (std::size_t i = 0; i < Hf.num_nodes(); ++i) CHECK(fine[i] == doctest::Approx(lin(Hf.nodes[i])));
}

TEST_CASE("homogenized evaluation is side aware") {
    Mesh H = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.2);
    std::vector<double> u(H.num_nodes(), 0.0);
    for (std::size_t t = 0; t < H.num_tris(); ++t)
        if (is_upper_tag(H.region[t]))
            for (int v : H.tris[t]) u[v] = 1.0;
    PointLocator loc(H);
    CHECK(evaluate_homogenized(loc, u, {0.1, 0.0}, +1) == doctest::Approx(1.0));
    CHECK(evaluate_homogenized(loc, u, {0.1, 0.0}, -1) == doctest::Approx(0.0));
    CHECK(evaluate_homogenized(loc, u, {0.1, 0.5}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(evaluate_homogenized(loc, u, {0.1, 0.0}), Error);
}

TEST_CASE("cell potentials on the perforated mesh") {
    auto spec = periodic_family(1.0, kInf, 0.2, 2);
    DomainMeshOptions mo;
    mo.h = 0.05;
    Mesh P = mesh_perforated(spec, mo);
    SolverOptions so;
    so.rel_tol = 1e-12;
    auto cells = cell_potentials(P, 5, so);
    REQUIRE(cells.capacity.size() == 5);
    // Identical cells on a mirrored mesh: equal capacities, close to the dedicated cell solve.
    for (double c : cells.capacity) CHECK(c == doctest::Approx(cells.capacity[0]).epsilon(2e-2));
    auto ref = cell_capacity(spec, 2);
    CHECK(cells.capacity[2] == doctest::Approx(ref.value).epsilon(0.05));
    CHECK(cells.capacity[2] >= ref.value * (1 - 1e-6));   // coarser conforming mesh gives a larger energy
    for (double v : cells.U) {
        CHECK(v >= -1e-9);
        CHECK(v <= 1.0 + 1e-9);
    }
}

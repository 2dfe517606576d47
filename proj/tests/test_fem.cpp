#include "doctest.h"

#include <cmath>
#include <limits>

#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/fem.hpp"
#include "sieve/mesh.hpp"

using namespace sieve;

namespace {
Mesh rectangle_mesh(double x0, double y0, double x1, double y1, double h) {
    Pslg g;
    g.add_polyline({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, edge_marker(EdgeKind::Outer), true);
    MeshParams p;
    p.h = h;
    return triangulate(g, p);
}
}  // namespace

TEST_CASE("reference element matrices") {
    Mat3 K = element_stiffness({0, 0}, {1, 0}, {0, 1});
    CHECK(K[0][0] == doctest::Approx(1.0));
    CHECK(K[0][1] == doctest::Approx(-0.5));
    CHECK(K[1][1] == doctest::Approx(0.5));
    CHECK(K[1][2] == doctest::Approx(0.0));
    Mat3 M = element_mass({0, 0}, {1, 0}, {0, 1});
    CHECK(M[0][0] == doctest::Approx(1.0 / 12));
    CHECK(M[0][1] == doctest::Approx(1.0 / 24));
}

TEST_CASE("assembled matrices: constants and area") {
    Mesh m = rectangle_mesh(0, 0, 2, 1, 0.1);
    auto sys = assemble(m);
    std::vector<double> one(m.num_nodes(), 1.0);
    auto k1 = sys.K * one;
    for (double v : k1) CHECK(std::abs(v) <= 1e-12);
    CHECK(sys.M.quadratic_form(one) == doctest::Approx(2.0));
    CHECK(sys.K.is_symmetric());
    auto b = load_vector(m, [](Vec2, int) { return 3.0; });
    double s = 0.0;
    for (double v : b) s += v;
    CHECK(s == doctest::Approx(6.0));
    // Axisymmetric weighting: int r dA over (0,2) x (0,1) = 2.
    AssemblyOptions ax;
    ax.axisymmetric = true;
    CHECK(assemble(m, ax).M.quadratic_form(one) == doctest::Approx(2.0));
}

TEST_CASE("patch test: affine data are reproduced exactly") {
    Mesh m = rectangle_mesh(0, 0, 1, 1, 0.07);
    auto sys = assemble(m);
    auto u_exact = [](Vec2 p) { return 1.0 + 2.0 * p.x - 3.0 * p.y; };
    auto fixed = m.marked_nodes(EdgeKind::Outer);
    std::vector<double> values;
    for (int i : fixed) values.push_back(u_exact(m.nodes[i]));
    SolverOptions o;
    o.rel_tol = 1e-14;
    auto u = solve_dirichlet(sys.K, std::vector<double>(m.num_nodes(), 0.0), fixed, values, o);
    double err = 0.0;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) err = std::max(err, std::abs(u[i] - u_exact(m.nodes[i])));
    CHECK(err <= 1e-10);
}

TEST_CASE("Neumann square spectrum") {
    // (0, pi)^2: eigenvalues 0, 1, 1, 2, 4.
    Mesh m = rectangle_mesh(0, 0, M_PI, M_PI, 0.05);
    auto sys = assemble(m);
    auto r = eig_smallest(sys.K, sys.M, 5);
    const double exact[5] = {0, 1, 1, 2, 4};
    CHECK(std::abs(r.values[0]) <= 1e-9);
    for (int j = 1; j < 5; ++j) CHECK(r.values[j] == doctest::Approx(exact[j]).epsilon(5e-3));
    for (int j = 1; j < 5; ++j) CHECK(r.values[j] >= exact[j]);   // conforming upper bounds
}

TEST_CASE("norms and integrals of P1 fields") {
    Mesh m = rectangle_mesh(0, 0, 1, 1, 0.1);
    auto sys = assemble(m);
    auto f = interpolate(m, [](Vec2 p) { return 1.0 + p.x; });
    auto n = norms(sys, f);
    CHECK(n.h1_semi == doctest::Approx(1.0));
    CHECK(n.l2 == doctest::Approx(std::sqrt(7.0 / 3.0)));
    CHECK(n.h1 == doctest::Approx(std::sqrt(10.0 / 3.0)));
    CHECK(integrate_field(m, f, [](int) { return true; }) == doctest::Approx(1.5));
    CHECK(mean_over_region(m, f, [](int) { return true; }) == doctest::Approx(1.5));
    CHECK_THROWS_AS(mean_over_region(m, f, [](int) { return false; }), Error);
    PointLocator loc(m);
    auto pi = integrate_over_polygon(loc, f, {{0.2, 0.2}, {0.6, 0.2}, {0.6, 0.5}, {0.2, 0.5}});
    CHECK(pi.area == doctest::Approx(0.12));
    CHECK(pi.integral == doctest::Approx(0.12 * 1.4));
    auto bf = broken_from_nodal(m, f);
    CHECK(broken_l2_sq(m, bf) == doctest::Approx(7.0 / 3.0));
    CHECK(broken_h1_semi_sq(m, bf) == doctest::Approx(1.0));
}

TEST_CASE("interface coupling measures the jump") {
    Mesh h = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.1);
    std::vector<double> f(h.num_nodes(), 0.0);
    for (std::size_t t = 0; t < h.num_tris(); ++t)
        if (is_upper_tag(h.region[t]))
            for (int v : h.tris[t]) f[v] = 1.0;
    // A unit jump over Gamma of length 1 with strength 2.5.
    CHECK(interface_coupling(h, 2.5).quadratic_form(f) == doctest::Approx(2.5));
    // Linear mu(x) = 1 + x is integrated exactly: int (1 + x) dx over (-1/2, 1/2) = 1.
    std::vector<double> mu(h.num_nodes());
    for (std::size_t i = 0; i < h.num_nodes(); ++i) mu[i] = 1.0 + h.nodes[i].x;
    CHECK(interface_coupling(h, mu).quadratic_form(f) == doctest::Approx(1.0));
    auto sys = assemble(h);
    auto C = interface_coupling(h, 2.5);
    auto n = norms(sys, f, &C);
    CHECK(n.jump == doctest::Approx(std::sqrt(2.5)));
}

TEST_CASE("periodic dof map identifies the lateral sides") {
    Mesh h = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.1);
    auto dm = DofMap::periodic(h);
    CHECK(dm.ndof == static_cast<int>(h.num_nodes() - h.periodic_pairs.size()));
    auto sys = assemble(h);
    auto Kc = dm.condense(sys.K);
    CHECK(Kc.rows() == dm.ndof);
    std::vector<double> one(dm.ndof, 1.0);
    for (double v : Kc * one) CHECK(std::abs(v) <= 1e-12);
    auto back = dm.expand(one);
    CHECK(back.size() == h.num_nodes());
}

TEST_CASE("degenerate triangles are rejected") {
    Mesh m;
    m.nodes = {{0, 0}, {1, 0}, {2, 0}};
    m.tris = {{0, 1, 2}};
    m.region = {0};
    CHECK_THROWS_AS(assemble(m), Error);
}

#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>

#include "sieve/clip.hpp"
#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/mesh.hpp"

using namespace sieve;

namespace {
long euler_characteristic(const Mesh& m) {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : m.tris)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    return static_cast<long>(m.num_nodes()) - static_cast<long>(edges.size()) + static_cast<long>(m.num_tris());
}

Mesh unit_square(double h) {
    Pslg g;
    g.add_polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, edge_marker(EdgeKind::Outer), true);
    MeshParams p;
    p.h = h;
    return triangulate(g, p);
}
}  // namespace

TEST_CASE("square triangulation is valid and well shaped") {
    Mesh m = unit_square(0.05);
    m.check();
    CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(euler_characteristic(m) == 1);
    auto q = quality(m);
    CHECK(q.min_angle_deg >= 20.0);
    CHECK(q.h_max <= 0.05 * 1.5);
}

TEST_CASE("holes are removed and the topology is an annulus") {
    Pslg g;
    g.add_polyline({{0, 0}, {3, 0}, {3, 3}, {0, 3}}, 1, true);
    g.add_polyline({{1, 1}, {2, 1}, {2, 2}, {1, 2}}, 2, true);
    g.holes.push_back({1.5, 1.5});
    MeshParams p;
    p.h = 0.3;
    Mesh m = triangulate(g, p);
    m.check();
    CHECK(m.area() == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(euler_characteristic(m) == 0);
    CHECK(m.marked_nodes(2).size() >= 4);
}

TEST_CASE("self-intersecting input is rejected") {
    Pslg g;
    g.add_polyline({{0, 0}, {2, 2}, {2, 0}, {0, 2}}, 1, true);
    MeshParams p;
    CHECK_THROWS_AS(triangulate(g, p), Error);
}

TEST_CASE("graded size field") {
    MeshParams p;
    p.h = 0.1;
    p.h_neck = 0.01;
    p.grading = 0.5;
    auto f = graded_size(p, {{{0, 0}, {1, 0}}});
    CHECK(f({0.5, 0.0}) == doctest::Approx(0.01));
    CHECK(f({0.5, 0.1}) == doctest::Approx(0.06));
    CHECK(f({0.5, 1.0}) == doctest::Approx(0.1));
}

TEST_CASE("uniform refinement is nested and area preserving") {
    Mesh m = unit_square(0.2);
    Mesh r = refine_uniform(m);
    r.check();
    CHECK(r.num_tris() == 4 * m.num_tris());
    CHECK(r.area() == doctest::Approx(m.area()).epsilon(1e-14));
    for (std::size_t i = 0; i < m.num_nodes(); ++i) CHECK(r.nodes[i] == m.nodes[i]);
    // Marking a single triangle refines it and closes the neighbours conformingly.
    Mesh one = refine(m, [](std::size_t t) { return t == 0; });
    one.check();
    CHECK(one.area() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.num_tris() > m.num_tris());
}

TEST_CASE("point location") {
    Mesh m = unit_square(0.1);
    PointLocator loc(m);
    for (Vec2 p : {Vec2{0.31, 0.77}, Vec2{0.999, 0.001}, Vec2{0.5, 0.5}}) {
        int t = loc.locate(p);
        REQUIRE(t >= 0);
        auto b = barycentric(m, t, p);
        for (double l : b) CHECK(l >= -1e-12);
        CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.0));
    }
    CHECK(loc.locate({1.5, 0.5}) == -1);
}

TEST_CASE("perforated mesh of a periodic family") {
    auto spec = periodic_family(1.0, std::numeric_limits<double>::infinity(), 0.2, 2);
    DomainMeshOptions o;
    o.h = 0.05;
    Mesh m = mesh_perforated(spec, o);
    m.check();
    auto dp = build_cells(spec);
    double wall = 0.0;
    for (const auto& w : dp.sieve_pieces) wall += std::abs(polygon_signed_area(w));
    CHECK(m.area() == doctest::Approx(2.0 - wall).epsilon(1e-12));
    // Periodic partners share x_n and sit on opposite sides.
    REQUIRE(!m.periodic_pairs.empty());
    for (auto [l, r] : m.periodic_pairs) {
        CHECK(m.nodes[l].y == m.nodes[r].y);
        CHECK(m.nodes[l].x == doctest::Approx(-0.5));
        CHECK(m.nodes[r].x == doctest::Approx(0.5));
    }
    // Every passage and guard region is present with the right area.
    for (int k = 0; k < 5; ++k) {
        double T = m.region_area([k](int t) { return is_passage_tag(t) && tag_index(t) == k; });
        CHECK(T == doctest::Approx(dp.cells[k].area_T).epsilon(1e-12));
        double B = m.region_area([k](int t) { return t == region_tag(RegionKind::GuardPlus, k); });
        CHECK(B == doctest::Approx(dp.cells[k].area_Bplus).epsilon(1e-10));
    }
    // Mirror symmetry of the node set.
    std::set<std::pair<double, double>> pts;
    for (auto p : m.nodes) pts.insert({p.x, p.y});
    for (auto p : m.nodes) CHECK(pts.count({p.x, -p.y}) == 1);
}

TEST_CASE("homogenized mesh doubles the interface") {
    Mesh h = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.1);
    h.check();
    CHECK(h.area() == doctest::Approx(2.0));
    REQUIRE(!h.gamma_pairs.empty());
    for (auto [u, l] : h.gamma_pairs) {
        CHECK(u != l);
        CHECK(h.nodes[u] == h.nodes[l]);
        CHECK(h.nodes[u].y == 0.0);
    }
    CHECK(h.region_area([](int t) { return is_upper_tag(t); }) == doctest::Approx(1.0));
}

TEST_CASE("cell mesh carries both arcs") {
    auto spec = periodic_family(1.0, std::numeric_limits<double>::infinity(), 0.2, 2);
    DomainMeshOptions o;
    o.h = 0.01;
    Mesh c = mesh_cell(spec, 2, o);
    c.check();
    CHECK(!c.marked_nodes(EdgeKind::SPlus).empty());
    CHECK(!c.marked_nodes(EdgeKind::SMinus).empty());
    auto dp = build_cells(spec);
    const auto& g = dp.cells[2];
    CHECK(c.area() == doctest::Approx(g.area_T + g.area_Bplus + g.area_Bminus).epsilon(1e-10));
}

TEST_CASE("submesh extraction keeps parents") {
    Mesh h = mesh_homogenized(0.5, 1.0, Lateral::Neumann, 0.2);
    auto sub = extract_submesh(h, [](int t) { return is_upper_tag(t); });
    sub.mesh.check();
    CHECK(sub.mesh.area() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < sub.mesh.num_nodes(); ++i) CHECK(sub.mesh.nodes[i] == h.nodes[sub.node_to_parent[i]]);
}

#include "doctest.h"

#include <cmath>
#include <limits>

#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/interface_form.hpp"

using namespace sieve;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

// Side-aware nodal interpolation on a Gamma-doubled mesh.
std::vector<double> interpolate_sided(const Mesh& m, const PiecewiseField& f) {
    std::vector<double> v(m.num_nodes(), 0.0);
    for (std::size_t t = 0; t < m.num_tris(); ++t) {
        int side = is_upper_tag(m.region[t]) ? +1 : -1;
        for (int n : m.tris[t]) v[n] = f.value(m.nodes[n], side);
    }
    return v;
}
}  // namespace

TEST_CASE("test pair values and norms") {
    auto pair = kappa_test_pair(0.5, 1.0);
    CHECK(pair.g.value({0.0, 0.5}, +1) == doctest::Approx(3.0 * 0.25));
    CHECK(pair.g.value({0.5, -0.5}, -1) == doctest::Approx(-1.0 * 0.25));
    CHECK(pair.h.value({0.1, 0.1}, +1) == 1.0);
    CHECK(pair.h.value({0.1, -0.1}, -1) == -1.0);
    // |h| = 1 with zero gradient on O = (-W, W) x (-L/2, L/2) of area 1.
    CHECK(strip_norm(pair.h, 0.5, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    // Independently integrated H2 norm of g over O.
    CHECK(strip_norm(pair.g, 0.5, 1.0, 2) == doctest::Approx(20.78406).epsilon(1e-6));
    // L2 part alone: int (2 + cos)^2 over x times 2 int_0^{1/2} (1 - y)^4 dy.
    double lx = 4.0 + 0.5, ly = 2.0 * (1.0 - std::pow(0.5, 5)) / 5.0;
    CHECK(strip_norm(pair.g, 0.5, 1.0, 0) == doctest::Approx(std::sqrt(lx * ly)).epsilon(1e-10));
}

TEST_CASE("interface integral of the jumps") {
    auto pair = kappa_test_pair(0.5, 1.0);
    // [g] = 2 (2 + cos), [h] = 2: int mu [g][h] = 8 mu (2 * 2W) / 2 = 16 mu W.
    CHECK(form_rhs([](double) { return 1.0; }, pair.g, pair.h, 0.5) == doctest::Approx(8.0));
    CHECK(form_rhs([](double) { return M_PI / 2; }, pair.g, pair.h, 0.5) == doctest::Approx(4.0 * M_PI));
    // The mesh version agrees for fields that are affine along Gamma up to the quadrature error.
    Mesh h = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.02);
    auto g = interpolate_sided(h, pair.g), hh = interpolate_sided(h, pair.h);
    CHECK(form_rhs(h, 1.0, g, hh) == doctest::Approx(8.0).epsilon(1e-3));
}

TEST_CASE("capacity-weighted sum") {
    GuardMeans g{{1.0, 2.0}, {-1.0, 0.0}}, h{{0.5, 0.5}, {-0.5, -0.5}};
    CHECK(form_lhs({3.0, 4.0}, g, h) == doctest::Approx(3.0 * 2.0 * 1.0 + 4.0 * 2.0 * 1.0));
    for (auto bad : {std::vector<double>{1.0}, std::vector<double>{1.0, std::nan("")},
                     std::vector<double>{1.0, -2.0}}) {
        try {
            form_lhs(bad, g, h);
            FAIL("expected MissingCapacity");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingCapacity);
        }
    }
}

TEST_CASE("guard means from polygons and from a mesh") {
    auto spec = periodic_family(1.0, kInf, 0.2, 2);
    auto pair = kappa_test_pair(0.5, 1.0);
    auto cells = build_cells(spec);
    auto hm = guard_means(cells, pair.h);
    REQUIRE(hm.plus.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(hm.plus[k] == doctest::Approx(1.0));
        CHECK(hm.minus[k] == doctest::Approx(-1.0));
    }
    auto gm = guard_means(cells, pair.g);
    DomainMeshOptions mo;
    mo.h = 0.02;
    Mesh m = mesh_perforated(spec, mo);
    std::vector<double> gn(m.num_nodes());
    for (std::size_t i = 0; i < m.num_nodes(); ++i) {
        Vec2 p = m.nodes[i];
        gn[i] = pair.g.value(p, p.y > 0 ? +1 : -1);
    }
    auto gmesh = guard_means(m, gn, 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(gmesh.plus[k] == doctest::Approx(gm.plus[k]).epsilon(1e-3));
        CHECK(gmesh.minus[k] == doctest::Approx(gm.minus[k]).epsilon(1e-3));
    }
}

TEST_CASE("both sides of the interface form agree to leading order") {
    auto spec = periodic_family(1.0, kInf, 0.2, 2);
    auto pair = kappa_test_pair(0.5, 1.0);
    auto caps = passage_capacities(spec);
    REQUIRE(caps.size() == 5);
    auto f = compare_forms(spec, mu_value(2, 1.0, kInf), pair, caps);
    CHECK(f.rhs == doctest::Approx(4.0 * M_PI));
    CHECK(f.defect == doctest::Approx(std::abs(f.lhs - f.rhs)));
    CHECK(f.kappa == doctest::Approx(f.defect / f.normalizer));
    CHECK(f.relative_defect() < 0.15);
    KappaRow row{spec->eps, 0.2, f};
    auto line = kappa_csv_row(row);
    CHECK(kappa_csv_header() == "eps,lhs,rhs,defect,kappa");
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
}

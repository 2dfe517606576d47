#include "doctest.h"

#include <cmath>
#include <limits>

#include "sieve/capacity.hpp"
#include "sieve/domain.hpp"
#include "sieve/geometry.hpp"

using namespace sieve;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("closed forms") {
    CHECK(annulus_capacity_exact(0.05, 0.5) == doctest::Approx(2 * M_PI / std::log(10.0)));
    CHECK(capacity_asym_2d(1.0, kInf, 0.1) == doctest::Approx(M_PI / 2 * 0.1));
    CHECK(capacity_asym_2d(2.0, 1.0, 0.1) == doctest::Approx(2 * M_PI / (2 + 2 * M_PI) * 0.1));
    CHECK(mu_value(2, 1.0, kInf) == doctest::Approx(M_PI / 2));
    CHECK(mu_value(2, 0.0, kInf) == 0.0);
    auto b = capacity_bound(0.004, 0.01, 2.0, 3.0, 0.1, 2);
    CHECK(b.trial_energy == doctest::Approx(0.004 / (4 * 1e-4)));
    CHECK(b.min_expression == doctest::Approx(std::min({2.0 * 0.1, 3.0 * 0.1, 40.0})));
}

TEST_CASE("parallel plate capacitor is exact") {
    // (0, 2) x (0, 0.5), U = 1 on top, 0 on bottom: energy = width / height = 4.
    Pslg g;
    int a = g.add_point({0, 0}), b = g.add_point({2, 0}), c = g.add_point({2, 0.5}), d = g.add_point({0, 0.5});
    g.add_segment(a, b, 1);
    g.add_segment(b, c, 3);
    g.add_segment(c, d, 2);
    g.add_segment(d, a, 3);
    MeshParams p;
    p.h = 0.1;
    Mesh m = triangulate(g, p);
    auto top = m.marked_nodes(2), bottom = m.marked_nodes(1);
    SolverOptions o;
    o.rel_tol = 1e-13;
    auto r = solve_capacity(m, top, bottom, o);
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(r.flux_value == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(r.min_U >= -1e-12);
    CHECK(r.max_U <= 1.0 + 1e-12);
}

TEST_CASE("annulus capacity against the logarithmic formula") {
    auto r = annulus_capacity(0.05, 0.5, 0.04, 0.05 * 2 * M_PI / 128, 128);
    double exact = annulus_capacity_exact(0.05, 0.5);
    CHECK(std::abs(r.value / exact - 1.0) < 0.01);
    CHECK(r.value >= exact * (1 - 1e-3));   // polygonal inner boundary is inscribed, the energy bound holds loosely
}

TEST_CASE("cell capacity of a straight passage") {
    auto spec = periodic_family(1.0, kInf, 0.2, 2);
    auto r = cell_capacity(spec, 2);
    const auto& pass = spec->passages[2];
    double area_T = passage_area(pass, spec->eps);
    auto sc = scale_report(spec, 0.0, 0.0);
    auto bound = capacity_bound(area_T, spec->eps, sc.passages[2].gamma_plus, sc.passages[2].gamma_minus, pass.rho, 2);
    CHECK(r.value <= bound.trial_energy * (1 + 1e-8));
    CHECK(r.value > 0.0);
    CHECK(r.flux_value == doctest::Approx(r.value).epsilon(1e-6));
    CHECK(r.symmetry_defect >= 0.0);
    CHECK(r.symmetry_defect <= 1e-3);
    CHECK(r.min_U >= -1e-9);
    CHECK(r.max_U <= 1.0 + 1e-9);
    CHECK(r.energy_plus + r.energy_passage + r.energy_minus == doctest::Approx(r.value).epsilon(1e-8));
    // Symmetric cell: both half-disks carry the same energy.
    CHECK(r.energy_plus == doctest::Approx(r.energy_minus).epsilon(1e-4));
    // Leading-order asymptotics within the expected range for this coarse family member.
    CHECK(std::abs(r.value / capacity_asym_2d(1.0, kInf, 0.2) - 1.0) < 0.1);
}

TEST_CASE("capacity CSV formatting") {
    auto h = capacity_csv_header();
    CHECK(h.find("k,") == 0);
    CapacityResult r;
    r.value = 0.5;
    r.flux_value = 0.5;
    auto row = capacity_csv_row(0, 0.1, 0.1, 0.2, 0.01, r, 1.0, 0.6);
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(h.begin(), h.end(), ','));
}

TEST_CASE("axisymmetric ball capacity, coarse") {
    AxisymOptions o;
    o.h_near_fraction = 1.0 / 40;
    o.check_truncation = false;
    auto b = newton_capacity_axisym(NewtonProfile::Ball, 1.0, o);
    CHECK(std::abs(b.cap / (4 * M_PI) - 1.0) < 0.02);
}

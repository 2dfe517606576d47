#include "doctest.h"

#include <cmath>

#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/mesh.hpp"
#include "sieve/spectral.hpp"

using namespace sieve;

namespace {
void expect_invalid(const std::vector<double>& x, const std::vector<double>& y, double threshold = -1.0) {
    try {
        weighted_hausdorff(x, y, threshold);
        FAIL("expected TruncationInvalid");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TruncationInvalid);
    }
}
}  // namespace

TEST_CASE("weighted Hausdorff distance by hand") {
    // {1/(1+0)} vs {1/(1+1)}.
    auto a = weighted_hausdorff({0.0}, {1.0});
    CHECK(a.value == doctest::Approx(0.5));
    CHECK(a.threshold == 0.0);
    CHECK(a.uncertainty == doctest::Approx(1.0));
    // {1/2, 1/4} vs {1/2, 1/2}: the point 1/4 is 1/4 away from the other set.
    auto b = weighted_hausdorff({1.0, 3.0}, {1.0, 1.0});
    CHECK(b.value == doctest::Approx(0.25));
    CHECK(b.threshold == 1.0);
    CHECK(b.uncertainty == doctest::Approx(0.5));
    CHECK(b.valid);
    // Symmetric and zero on equal sets.
    CHECK(weighted_hausdorff({0, 2, 5}, {0, 2, 5}).value == 0.0);
    CHECK(weighted_hausdorff({0, 2, 5}, {0, 3, 5}).value == doctest::Approx(weighted_hausdorff({0, 3, 5}, {0, 2, 5}).value));
}

TEST_CASE("invalid truncations") {
    expect_invalid({}, {});
    expect_invalid({0.0, 1.0}, {0.0});
    expect_invalid({1.0, 0.0}, {0.0, 1.0});
    expect_invalid({-1.0, 1.0}, {0.0, 1.0});
    expect_invalid({0.0, 1.0}, {0.0, 2.0}, 1.5);   // k-th value of x below the threshold
}

TEST_CASE("Neumann spectrum of a square") {
    Pslg g;
    g.add_polyline({{0, 0}, {M_PI, 0}, {M_PI, M_PI}, {0, M_PI}}, edge_marker(EdgeKind::Outer), true);
    MeshParams p;
    p.h = 0.06;
    Mesh m = triangulate(g, p);
    auto s = perforated_spectrum(m, 5);
    const double exact[5] = {0, 1, 1, 2, 4};
    CHECK(std::abs(s.values[0]) <= 1e-10);
    for (int j = 1; j < 5; ++j) CHECK(s.values[j] == doctest::Approx(exact[j]).epsilon(1e-2));
    for (double r : s.residuals) CHECK(r <= 1e-8);
    CHECK(s.op == "perforated");
}

TEST_CASE("homogenized spectrum: decoupled and coupled halves") {
    Mesh h = mesh_homogenized(0.5, 1.0, Lateral::Periodic, 0.05);
    // mu = 0: two independent periodic-Neumann halves of height 1, each with 0 and pi^2 (x_n mode).
    auto s0 = homogenized_spectrum(h, 0.0, 4);
    CHECK(std::abs(s0.values[0]) <= 1e-10);
    CHECK(std::abs(s0.values[1]) <= 1e-10);
    CHECK(s0.values[2] == doctest::Approx(M_PI * M_PI).epsilon(1e-2));
    CHECK(s0.values[3] == doctest::Approx(M_PI * M_PI).epsilon(1e-2));
    // mu > 0 couples the constants: the antisymmetric mode solves k tan k = 2 mu on (0, 1).
    const double mu = M_PI / 2;
    auto s1 = homogenized_spectrum(h, mu, 2);
    CHECK(std::abs(s1.values[0]) <= 1e-10);
    double k = 1.0;
    for (int it = 0; it < 60; ++it) {
        double f = k * std::tan(k) - 2 * mu;
        double df = std::tan(k) + k / (std::cos(k) * std::cos(k));
        k -= f / df;
    }
    CHECK(s1.values[1] == doctest::Approx(k * k).epsilon(5e-3));
}

TEST_CASE("spectral rows and CSV") {
    SpectrumReport a, b;
    a.values = {0.0, 1.0, 2.0};
    b.values = {0.0, 1.0, 3.0};
    auto rows = spectral_gap_report({0.01}, {a}, {b}, {0.1});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].distance.value == doctest::Approx(1.0 / 3 - 1.0 / 4));
    CHECK(rows[0].ratio() == doctest::Approx((1.0 / 3 - 1.0 / 4) / 0.1));
    CHECK(spectral_csv_header(3) == "eps,lp1,lp2,lp3,lh1,lh2,lh3,distance,uncertainty,sigma");
    auto line = spectral_csv_row(rows[0]);
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
}

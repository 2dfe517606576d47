#include "doctest.h"

#include <cmath>
#include <limits>

#include "sieve/domain.hpp"
#include "sieve/noncon.hpp"

using namespace sieve;

TEST_CASE("witness closed forms") {
    // Bridge, eps = 0.1, alpha = 1: |v|^2 = 4 eps^2/9 + 8 eps^5/9, |grad v|^2 = 6 eps^3.
    auto b = witness_closed_form(WitnessKind::Bridge, 0.1, 1.0);
    CHECK(b.l2_sq == doctest::Approx(4 * 0.01 / 9 + 8e-5 / 9));
    CHECK(b.grad_sq == doctest::Approx(6e-3));
    CHECK(b.quotient() == doctest::Approx(0.652702).epsilon(1e-5));
    // Bump with xi = eps/2: the quotient tends to 1 as eps -> 0.
    auto q1 = witness_closed_form(WitnessKind::Bump, 0.05, 1.0).quotient();
    auto q2 = witness_closed_form(WitnessKind::Bump, 0.025, 1.0).quotient();
    CHECK(q1 >= 0.7);
    CHECK(q2 > q1);
    CHECK(parse_witness("bump") == WitnessKind::Bump);
}

TEST_CASE("bridge witness on a mesh matches the closed form") {
    auto w = witness_quotient(WitnessKind::Bridge, 0.1, 1.0, 0.0, {}, true);
    CHECK(w.fem == doctest::Approx(w.closed_form).epsilon(0.05));
    // The discrete supremum dominates any particular field.
    CHECK(w.zeta >= w.fem * (1 - 1e-6));
}

TEST_CASE("zeta dominates the constant field and stays below one") {
    auto spec = periodic_family(1.0, std::numeric_limits<double>::infinity(), 0.2, 2);
    DomainMeshOptions mo;
    mo.h = 0.1;
    Mesh m = mesh_perforated(spec, mo);
    std::vector<double> one(m.num_nodes(), 1.0);
    double T = m.region_area(is_passage_tag);
    CHECK(passage_quotient(m, one) == doctest::Approx(std::sqrt(T / m.area())));
    auto z = zeta(m);
    CHECK(z.zeta >= passage_quotient(m, one));
    CHECK(z.zeta < 1.0);
    CHECK(passage_quotient(m, z.field) == doctest::Approx(z.zeta).epsilon(1e-6));
}

TEST_CASE("zeta of straight passages shrinks like sqrt(eps)") {
    std::vector<double> ratio;
    for (double eps : {0.1, 0.05, 0.025}) {
        SieveSpec s;
        s.eps = eps;
        s.period = 0.2;
        for (int k = 0; k < 5; ++k) {
            Passage p;
            p.center = -0.4 + 0.2 * k;
            p.rho = 0.1;
            p.shape = PassageShape::straight(0.005);
            s.passages.push_back(p);
        }
        auto vs = validate_spec(s);
        DomainMeshOptions mo;
        mo.h = 0.05;
        auto z = zeta(mesh_perforated(vs, mo));
        ratio.push_back(z.zeta / std::sqrt(eps));
    }
    double lo = *std::min_element(ratio.begin(), ratio.end());
    double hi = *std::max_element(ratio.begin(), ratio.end());
    CHECK(hi / lo <= 3.0);
}

TEST_CASE("curved-passage bounds for constant profiles") {
    double eps = 0.01, d = 0.002;
    auto b = curved_bounds(constant_profile(eps, d), constant_profile(eps, d), eps);
    double expect = eps * eps + eps * d * std::abs(std::log(d));
    CHECK(b.G == doctest::Approx(expect));
    CHECK(b.H == doctest::Approx(expect));
    auto t = curved_bounds(tent_profile(eps, d, d / 2), constant_profile(eps, d), eps);
    CHECK(t.G > b.G);   // slope and width ratio both increase the bound
}

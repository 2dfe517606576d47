#include "doctest.h"

#include <cmath>

#include "sieve/config.hpp"
#include "sieve/error.hpp"
#include "sieve/harness.hpp"

using namespace sieve;

namespace {
ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::IoError;
}
}  // namespace

TEST_CASE("power-law fit") {
    std::vector<double> x{0.1, 0.05, 0.025, 0.0125}, y;
    for (double v : x) y.push_back(3.0 * std::sqrt(v));
    auto r = rate_fit(x, y);
    CHECK(r.slope == doctest::Approx(0.5));
    CHECK(r.intercept == doctest::Approx(std::log(3.0)));
    CHECK(r.r2 == doctest::Approx(1.0));
    CHECK(kind_of([] { rate_fit({1, 2}, {1, 2}); }) == ErrorKind::NonPositiveData);
    CHECK(kind_of([] { rate_fit({1, 2, 3}, {1, 0, 2}); }) == ErrorKind::NonPositiveData);
}

TEST_CASE("plans from configuration") {
    auto plan = plan_from_config(Config::parse(
        "family.p = 1\nfamily.q = inf\nsweep.rho = 0.2, 0.1, 0.05\nsource.name = trig\nmesh.h = 0.1\nspectral.k = 4\n"));
    CHECK(plan.rho.size() == 3);
    CHECK(plan.source == "trig");
    CHECK(plan.h == 0.1);
    CHECK(plan.spectral_k == 4);
    CHECK(plan.refinements == 1);
    auto eps = plan_eps(plan);
    for (std::size_t i = 0; i < 3; ++i) CHECK(eps[i] == doctest::Approx(std::exp(-1.0 / plan.rho[i])));

    CHECK(kind_of([] { plan_from_config(Config::parse("family.p = 1\nsweep.rho = 0.2, 0.1\n")); }) ==
          ErrorKind::ConfigError);
    CHECK(kind_of([] { plan_from_config(Config::parse("family.p = 1\nsweep.rho = 0.05, 0.1, 0.2\n")); }) ==
          ErrorKind::ConfigError);
    CHECK(kind_of([] { plan_from_config(Config::parse("family.p = 1\n")); }) == ErrorKind::ConfigError);
}

TEST_CASE("row flags and CSV layout") {
    SweepRow r;
    CHECK(r.flags() == "ok");
    r.control = true;
    r.under_resolved = true;
    CHECK(r.flags() == "control;under_resolved");
    auto h = sweep_csv_header();
    CHECK(h == "eps,err1,err2,err3,err4,sqrt_eps,zeta,kappa,chi,sigma,corr_h1_plus,corr_h1_minus,corr_h1_T,"
               "energy_defect,dist_spec,flags");
    auto line = sweep_csv_row(r);
    CHECK(std::count(line.begin(), line.end(), ',') == std::count(h.begin(), h.end(), ','));
}

TEST_CASE("one family member on a coarse mesh") {
    SweepPlan plan;
    plan.rho = {0.2, 0.1, 0.05};
    plan.h = 0.1;
    plan.spectral_k = 3;
    plan.kappa = false;
    auto row = sweep_point(plan, 0.2);
    CHECK(row.eps == doctest::Approx(std::exp(-5.0)));
    CHECK(row.mu == doctest::Approx(M_PI / 2));
    for (double e : row.err) CHECK(e > 0.0);
    // err2 and err4 add the wall contributions to err3 and err1.
    CHECK(row.err[3] >= row.err[0]);
    CHECK(row.err[1] >= row.err[2]);
    CHECK(row.sigma == doctest::Approx(std::max({row.sqrt_eps, row.zeta, row.kappa, row.chi})));
    CHECK(row.spectrum_perforated.size() == 3);
    CHECK(row.dist_spec >= 0.0);
    CHECK(row.dist_uncertainty > 0.0);
    CHECK(row.correctors.energy_defect >= 0.0);
    CHECK(row.source_norm == doctest::Approx(1.0));

    // Constant source: both solutions are the constant, so err1 vanishes and err4 reduces to the
    // norm of the constant over the solid wall of area 2 eps (1 - 2 d / rho).
    auto ctl = sweep_point(plan, 0.2, make_source("constant", 0.5, 1.0));
    CHECK(ctl.err[0] <= 1e-9);
    double wall = 2.0 * ctl.eps * (1.0 - 2.0 * ctl.eps / 0.2);
    CHECK(ctl.err[3] == doctest::Approx(std::sqrt(wall)).epsilon(1e-9));
}

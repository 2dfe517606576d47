// Acceptance run: one PASS/FAIL line per criterion, followed by a summary.
// Exit status is 0 only when every criterion passes.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sieve/capacity.hpp"
#include "sieve/config.hpp"
#include "sieve/domain.hpp"
#include "sieve/fem.hpp"
#include "sieve/harness.hpp"
#include "sieve/interface_form.hpp"
#include "sieve/mesh.hpp"
#include "sieve/noncon.hpp"
#include "sieve/numerics.hpp"

using namespace sieve;
namespace fs = std::filesystem;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

double spread(const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : kInf;
}

std::string list(const std::vector<double>& v, int digits = 4) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i], digits);
    return s + "]";
}

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0.0 && secs > limit_s) {
        o.pass = false;
        o.detail += "; runtime limit " + num(limit_s) + " s exceeded";
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

Mesh rectangle_mesh(double x1, double y1, double h) {
    Pslg g;
    g.add_polyline({{0, 0}, {x1, 0}, {x1, y1}, {0, y1}}, edge_marker(EdgeKind::Outer), true);
    MeshParams p;
    p.h = h;
    return triangulate(g, p);
}

// ---------------------------------------------------------------------------------------------

Outcome fem_validation() {
    // Patch test: affine Dirichlet data on the unit square.
    Mesh m = rectangle_mesh(1.0, 1.0, 0.05);
    auto sys = assemble(m);
    auto exact = [](Vec2 p) { return 0.3 + 1.7 * p.x - 2.2 * p.y; };
    auto fixed = m.marked_nodes(EdgeKind::Outer);
    std::vector<double> values;
    for (int i : fixed) values.push_back(exact(m.nodes[i]));
    SolverOptions so;
    so.rel_tol = 1e-14;
    auto u = solve_dirichlet(sys.K, std::vector<double>(m.num_nodes(), 0.0), fixed, values, so);
    double patch = 0.0;
    for (std::size_t i = 0; i < m.num_nodes(); ++i) patch = std::max(patch, std::abs(u[i] - exact(m.nodes[i])));

    // First non-zero Neumann eigenvalue of the unit square (pi^2) on nested refinements.
    Mesh level = rectangle_mesh(1.0, 1.0, 0.1);
    std::vector<double> errs;
    for (int r = 0; r < 4; ++r) {
        if (r > 0) level = refine_uniform(level);
        auto s = assemble(level);
        auto e = eig_smallest(s.K, s.M, 2);
        errs.push_back(e.values[1] - M_PI * M_PI);
    }
    std::vector<double> orders;
    for (std::size_t i = 1; i < errs.size(); ++i) orders.push_back(std::log2(errs[i - 1] / errs[i]));
    bool order_ok = std::abs(orders.back() - 2.0) <= 0.3;
    return {patch <= 1e-10 && order_ok,
            "patch max error " + num(patch, 3) + ", eigenvalue errors " + list(errs, 3) + ", orders " + list(orders, 3)};
}

Outcome annulus() {
    const double a = 0.05, b = 0.5;
    auto r = annulus_capacity(a, b, 0.02, a * 2 * M_PI / 256);
    double exact = annulus_capacity_exact(a, b);
    double rel = std::abs(r.value / exact - 1.0);
    return {rel < 0.01 && r.mesh.num_nodes() <= 100000,
            "C=" + num(r.value, 7) + " exact=" + num(exact, 7) + " rel=" + num(rel, 3) +
                " nodes=" + std::to_string(r.mesh.num_nodes())};
}

Outcome newton() {
    auto ball = newton_capacity_axisym(NewtonProfile::Ball, 1.0);
    auto disk = newton_capacity_axisym(NewtonProfile::Disk, 1.0);
    double rb = std::abs(ball.cap / (4 * M_PI) - 1.0), rd = std::abs(disk.cap / 8.0 - 1.0);
    return {rb < 0.01 && rd < 0.02, "ball " + num(ball.cap, 6) + " (rel " + num(rb, 3) + "), disk " +
                                        num(disk.cap, 6) + " (rel " + num(rd, 3) + "), R_inf=50 Robin"};
}

struct CellRun {
    std::string label;
    CapacityResult result;
    double trial = 0.0;
};
std::vector<CellRun> family_cells;   // filled by criterion 4, reused by 5 and 6

Outcome cell_asymptotics() {
    std::vector<double> dev;
    for (double rho : {0.2, 0.1, 0.05}) {
        auto spec = periodic_family(1.0, kInf, rho, 2);
        int k = static_cast<int>(spec->passages.size()) / 2;
        auto r = cell_capacity(spec, k);
        double as = capacity_asym_2d(1.0, kInf, rho);
        dev.push_back(std::abs(r.value - as) / as);
        double trial = passage_area(spec->passages[k], spec->eps) / (4 * spec->eps * spec->eps);
        family_cells.push_back({"family rho=" + num(rho), std::move(r), trial});
    }
    bool ok = dev.back() < 0.25 && strictly_decreasing(dev);
    return {ok, "relative deviations " + list(dev, 3) + " over rho [0.2 0.1 0.05]" +
                    (strictly_decreasing(dev) ? "" : " (not monotone)")};
}

std::vector<CellRun> straight_cells() {
    std::vector<CellRun> out;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        SieveSpec s;
        s.eps = eps;
        s.lateral = Lateral::Neumann;
        Passage p;
        p.shape = PassageShape::straight(0.005);
        p.rho = 0.1;
        s.passages.push_back(p);
        auto vs = validate_spec(s);
        auto r = cell_capacity(vs, 0);
        double trial = passage_area(p, eps) / (4 * eps * eps);
        out.push_back({"straight d=0.005 eps=" + num(eps), std::move(r), trial});
    }
    return out;
}
std::vector<CellRun> extra_cells;

Outcome trial_bound() {
    extra_cells = straight_cells();
    double worst = -kInf;
    int count = 0;
    for (const auto* set : {&family_cells, &extra_cells})
        for (const auto& c : *set) {
            worst = std::max(worst, c.result.value / c.trial);
            ++count;
        }
    return {count > 0 && worst <= 1.0 + 1e-8,
            std::to_string(count) + " cells, max C_h / (|T|/(4 eps^2)) = " + num(worst, 6)};
}

Outcome symmetry() {
    double worst = 0.0;
    int count = 0;
    for (const auto* set : {&family_cells, &extra_cells})
        for (const auto& c : *set) {
            if (c.result.symmetry_defect < 0.0) return {false, c.label + " was not recognised as symmetric"};
            worst = std::max(worst, c.result.symmetry_defect);
            ++count;
        }
    return {count > 0 && worst <= 1e-3, std::to_string(count) + " cells, max symmetry defect " + num(worst, 3)};
}

Outcome non_concentration() {
    std::string detail;
    bool ok = true;
    for (int shape = 0; shape < 2; ++shape) {
        std::vector<double> ratio;
        for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
            SieveSpec s;
            s.eps = eps;
            s.period = 0.2;
            for (int k = 0; k < 5; ++k) {
                Passage p;
                p.center = -0.4 + 0.2 * k;
                p.rho = 0.1;
                p.shape = shape == 0 ? PassageShape::straight(0.005) : PassageShape::hourglass(0.005, 0.0025);
                s.passages.push_back(p);
            }
            DomainMeshOptions mo;
            mo.h = 0.05;
            auto z = zeta(mesh_perforated(validate_spec(s), mo));
            ratio.push_back(z.zeta / std::sqrt(eps));
        }
        double sp = spread(ratio);
        ok = ok && sp <= 3.0;
        detail += std::string(shape == 0 ? "(a) straight" : "; hourglass") + " zeta/sqrt(eps) " + list(ratio, 3) +
                  " max/min " + num(sp, 3);
    }
    auto bridge = witness_quotient(WitnessKind::Bridge, 0.1, 1.0, 0.0, {}, false);
    double rel = std::abs(bridge.fem / bridge.closed_form - 1.0);
    ok = ok && rel <= 0.05;
    detail += "; (b) bridge FEM " + num(bridge.fem, 6) + " closed form " + num(bridge.closed_form, 6);
    std::vector<double> bump;
    for (double eps : {0.05, 0.025}) bump.push_back(witness_quotient(WitnessKind::Bump, eps, 1.0).zeta);
    ok = ok && *std::min_element(bump.begin(), bump.end()) >= 0.7;
    detail += "; (c) bump zeta at eps [0.05 0.025] " + list(bump, 5);
    return {ok, detail};
}

Outcome interface_form() {
    std::vector<ValidatedSpec> fam;
    for (double rho : {0.2, 0.1, 0.05}) fam.push_back(periodic_family(1.0, kInf, rho, 2));
    auto rows = kappa_sweep(fam, mu_value(2, 1.0, kInf), kappa_test_pair(0.5, 1.0));
    std::vector<double> kap, rel;
    for (const auto& r : rows) {
        kap.push_back(r.form.kappa);
        rel.push_back(r.form.relative_defect());
    }
    bool ok = strictly_decreasing(kap) && rel.back() < 0.10;
    return {ok, "kappa " + list(kap, 4) + (strictly_decreasing(kap) ? "" : " (not monotone)") +
                    ", relative defects " + list(rel, 3)};
}

// ---------------------------------------------------------------------------------------------

std::optional<ConvergenceReport> sweep;
std::string sweep_error;
double sweep_seconds = 0.0;

void run_sweep() {
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto plan = plan_from_config(Config::load((fs::path(SIEVE_SOURCE_DIR) / "configs" / "sweep.cfg").string()));
        sweep = convergence_sweep(plan);
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome discrepancies() {
    if (!sweep) return {false, "sweep failed: " + sweep_error};
    const auto& rows = sweep->rows;
    bool ok = sweep_seconds < 15 * 60;
    std::string detail;
    for (int j = 0; j < 4; ++j) {
        std::vector<double> e, r;
        for (const auto& row : rows) {
            e.push_back(row.err[j]);
            r.push_back(row.err[j] / row.sigma);
        }
        bool mono = strictly_decreasing(e);
        double sp = spread(r);
        ok = ok && mono && sp <= 5.0;
        detail += (j ? "; " : "") + std::string("err") + std::to_string(j + 1) + " " + list(e, 3) +
                  (mono ? "" : " (not monotone)") + " err/sigma max/min " + num(sp, 3);
    }
    bool resolved = std::none_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.under_resolved; });
    ok = ok && resolved;
    detail += resolved ? "; Richardson gate passed on every row" : "; a row is under-resolved";
    detail += ok ? "; sweep part holds" : "; sweep part fails";
    if (!sweep->control) return {false, detail + "; control row missing"};
    // f = const requires every discrepancy <= 1e-9. For err2..err4 the zero extension over the solid wall
    // makes them non-zero; err4 is exactly c sqrt(|wall|), reported next to the measured value.
    const SweepRow& c = *sweep->control;
    double wall = 2.0 * c.eps * (1.0 - 2.0 * c.eps / c.rho);
    double expect4 = std::abs(sweep->plan.source_value) * std::sqrt(wall);
    bool ctl = std::all_of(std::begin(c.err), std::end(c.err), [](double e) { return e <= 1e-9; });
    ok = ok && ctl;
    detail += "; control row errors " + list({c.err[0], c.err[1], c.err[2], c.err[3]}, 3) +
              (ctl ? "" : " (not all <= 1e-9)") + ", wall term c sqrt(|wall|) = " + num(expect4, 6);
    return {ok, detail};
}

Outcome correctors() {
    if (!sweep) return {false, "sweep failed: " + sweep_error};
    std::vector<double> defect, lp, lm, lt;
    for (const auto& r : sweep->rows) {
        defect.push_back(r.correctors.energy_defect);
        lp.push_back(r.correctors.l2_plus);
        lm.push_back(r.correctors.l2_minus);
        lt.push_back(r.correctors.l2_T);
    }
    bool ok = defect.back() < 0.15 && strictly_decreasing(defect) && strictly_decreasing(lp) &&
              strictly_decreasing(lm) && strictly_decreasing(lt);
    return {ok, "energy defect " + list(defect, 3) + ", L2 ratios K+ " + list(lp, 3) + " K- " + list(lm, 3) + " K^T " +
                    list(lt, 3)};
}

Outcome spectral_distance() {
    if (!sweep) return {false, "sweep failed: " + sweep_error};
    std::vector<double> d, u, ratio;
    for (const auto& r : sweep->rows) {
        d.push_back(r.dist_spec);
        u.push_back(r.dist_uncertainty);
        ratio.push_back(r.dist_spec / r.sigma);
    }
    double sp = spread(ratio);
    bool ok = strictly_decreasing(d) && sp <= 5.0 && sweep_seconds < 10 * 60;
    return {ok, "distance (k=" + std::to_string(sweep->plan.spectral_k) + ") " + list(d, 3) + " tail uncertainty " +
                    list(u, 3) + ", distance/sigma max/min " + num(sp, 3)};
}

// ---------------------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    const std::string cfg = (fs::path(SIEVE_SOURCE_DIR) / "configs" / "sweep_quick.cfg").string();
    fs::path base = fs::temp_directory_path() / "sieve_acceptance_determinism";
    fs::remove_all(base);
    std::vector<fs::path> outs;
    for (const char* workers : {"1", "3"}) {
        fs::path out = base / (std::string("workers_") + workers);
        std::string cmd = std::string("SIEVE_WORKERS=") + workers + " '" + SIEVE_CLI_PATH + "' sweep '" + cfg +
                          "' --out '" + out.string() + "' >/dev/null 2>&1";
        int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "sweep run failed: " + cmd};
        outs.push_back(out);
    }
    for (const char* name : {"sweep.csv", "sweep_details.csv", "rates.csv"}) {
        std::string a = slurp(outs[0] / name), b = slurp(outs[1] / name);
        if (a.empty() || a != b) return {false, std::string(name) + " differs between runs"};
    }
    return {true, "two CLI sweeps (SIEVE_WORKERS=1 and 3) wrote byte-identical sweep.csv, sweep_details.csv, rates.csv"};
}

}  // namespace

int main() {
    std::printf("acceptance run, workers=%s\n", std::getenv("SIEVE_WORKERS") ? std::getenv("SIEVE_WORKERS") : "auto");
    report(1, "FEM validation", 60, fem_validation);
    report(2, "annulus capacity", 60, annulus);
    report(3, "Newton capacity (axisymmetric)", 120, newton);
    report(4, "cell-capacity asymptotics", 300, cell_asymptotics);
    report(5, "trial-bound inequality", 0, trial_bound);
    report(6, "symmetry of U", 0, symmetry);
    report(7, "non-concentration", 600, non_concentration);
    report(8, "interface form", 300, interface_form);
    run_sweep();
    std::printf("(convergence sweep: %.1f s)\n", sweep_seconds);
    report(9, "discrepancy sweep", 0, discrepancies);
    report(10, "correctors", 0, correctors);
    report(11, "spectral distance", 0, spectral_distance);
    report(12, "determinism", 0, determinism);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

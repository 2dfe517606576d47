// Command-line front end. Every subcommand reads a configuration file and writes its results
// into the directory given by --out.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "sieve/capacity.hpp"
#include "sieve/config.hpp"
#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/harness.hpp"
#include "sieve/interface_form.hpp"
#include "sieve/noncon.hpp"
#include "sieve/solvers.hpp"
#include "sieve/spectral.hpp"

using namespace sieve;
namespace fs = std::filesystem;

namespace {

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(10) << v;
    return os.str();
}

void write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) fail(ErrorKind::IoError, "cannot write " + (dir / name).string());
    f << text;
    if (!f) fail(ErrorKind::IoError, "write failed for " + (dir / name).string());
}

DomainMeshOptions mesh_options(const Config& cfg) {
    DomainMeshOptions mo;
    mo.h = cfg.get_double("mesh.h", mo.h);
    mo.h_neck = cfg.get_double("mesh.h_neck", mo.h_neck);
    mo.grading = cfg.get_double("mesh.grading", mo.grading);
    mo.min_angle_deg = cfg.get_double("mesh.min_angle", mo.min_angle_deg);
    mo.use_symmetry = cfg.get_bool("mesh.symmetry", mo.use_symmetry);
    return mo;
}

Mesh refined(Mesh m, const Config& cfg) {
    long r = cfg.get_int("mesh.refinements", 0);
    if (r < 0) fail(ErrorKind::ConfigError, "mesh.refinements must be non-negative");
    for (long i = 0; i < r; ++i) m = refine_uniform(m);
    return m;
}

double resolve_mu(const Config& cfg, int n) {
    if (cfg.has("homogenized.mu")) {
        double mu = cfg.get_double("homogenized.mu");
        if (!(mu >= 0.0)) fail(ErrorKind::ConfigError, "homogenized.mu must be non-negative");
        return mu;
    }
    if (cfg.has("family.p"))
        return mu_value(n, cfg.get_double("family.p"), cfg.get_double("family.q", std::numeric_limits<double>::infinity()));
    fail(ErrorKind::ConfigError, "set homogenized.mu or a periodic family (family.p)");
}

Source source_from(const Config& cfg, const SieveSpec& s) {
    return make_source(cfg.get_string("source.name", "upper"), s.W, s.L, cfg.get_double("source.value", 1.0));
}

// ---------------------------------------------------------------------------------------------

int cmd_validate(const Config& cfg, const fs::path& out) {
    SieveSpec s = spec_from_config(cfg);
    auto v = check_spec(s);
    std::ostringstream os;
    if (v.empty()) {
        os << "valid: " << s.passages.size() << " passages, eps = " << sci(s.eps) << '\n';
    } else {
        for (const auto& x : v)
            os << error_kind_name(x.kind) << " [" << x.constraint << "] " << x.message
               << '\n';
    }
    write_file(out, "validation.txt", os.str());
    std::cout << os.str();
    return v.empty() ? 0 : 2;
}

int cmd_mesh(const Config& cfg, const fs::path& out) {
    std::string kind = cfg.get_string("mesh.kind", "perforated");
    Mesh m;
    if (kind == "homogenized") {
        SieveSpec s = spec_from_config(cfg);
        m = mesh_homogenized(s.W, s.L, s.lateral, cfg.get_double("mesh.h", 0.05));
    } else {
        ValidatedSpec spec = validate_spec(spec_from_config(cfg));
        if (kind == "perforated") {
            m = mesh_perforated(spec, mesh_options(cfg));
        } else if (kind == "cell") {
            m = mesh_cell(spec, static_cast<int>(cfg.get_int("mesh.cell", 0)), mesh_options(cfg));
        } else {
            fail(ErrorKind::ConfigError, "mesh.kind must be perforated, homogenized or cell");
        }
    }
    m = refined(std::move(m), cfg);
    m.check();
    export_mesh(m, out.string(), kind);
    QualityReport q = quality(m);
    std::ostringstream os;
    os << "kind," << kind << "\nnodes," << m.num_nodes() << "\ntriangles," << m.num_tris() << "\narea," << sci(m.area())
       << "\nmin_angle_deg," << sci(q.min_angle_deg) << "\nh_min," << sci(q.h_min) << "\nh_max," << sci(q.h_max) << '\n';
    write_file(out, "mesh_summary.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_capacity(const Config& cfg, const fs::path& out) {
    std::string problem = cfg.get_string("capacity.problem", "cells");
    std::ostringstream os;
    if (problem == "cells") {
        ValidatedSpec spec = validate_spec(spec_from_config(cfg));
        CapacityOptions co;
        if (cfg.has("mesh.h")) co.mesh.h = cfg.get_double("mesh.h");
        if (cfg.has("mesh.h_neck")) co.mesh.h_neck = cfg.get_double("mesh.h_neck");
        co.mesh.grading = cfg.get_double("mesh.grading", co.mesh.grading);
        ScaleReport sr = scale_report(spec, 0.0, 0.0);
        DomainPolygons cells = build_cells(spec);
        const double period = spec->period > 0.0 ? spec->period : 2.0 * sr.rho;
        const double asym = spec->n == 2 ? capacity_asym_2d(sr.p, sr.q, period) : std::nan("");
        os << capacity_csv_header() << '\n';
        for (std::size_t k = 0; k < spec->passages.size(); ++k) {
            const auto& p = spec->passages[k];
            CapacityResult r = cell_capacity(spec, static_cast<int>(k), co);
            double bound = capacity_bound(cells.cells[k].area_T, spec->eps, sr.passages[k].gamma_plus,
                                          sr.passages[k].gamma_minus, p.rho, spec->n)
                               .trial_energy;
            os << capacity_csv_row(static_cast<int>(k), face_radius(p, spec->eps, 1), face_radius(p, spec->eps, -1),
                                   p.rho, spec->eps, r, bound, asym)
               << '\n';
        }
    } else if (problem == "annulus") {
        double a = cfg.get_double("capacity.a", 0.05), b = cfg.get_double("capacity.b", 0.5);
        CapacityResult r = annulus_capacity(a, b, cfg.get_double("mesh.h", 0.02), cfg.get_double("mesh.h_neck", a / 40.0));
        os << "a,b,capacity,exact,nodes\n"
           << sci(a) << ',' << sci(b) << ',' << sci(r.value) << ',' << sci(annulus_capacity_exact(a, b)) << ','
           << r.mesh.num_nodes() << '\n';
    } else if (problem == "ball" || problem == "disk") {
        AxisymOptions ao;
        ao.R_inf = cfg.get_double("capacity.R_inf", ao.R_inf);
        double size = cfg.get_double("capacity.radius", 1.0);
        NewtonResult r =
            newton_capacity_axisym(problem == "ball" ? NewtonProfile::Ball : NewtonProfile::Disk, size, ao);
        double exact = problem == "ball" ? 4.0 * M_PI * size : 8.0 * size;
        os << "profile,radius,R_inf,capacity,capacity_doubled_R,exact,nodes\n"
           << problem << ',' << sci(size) << ',' << sci(ao.R_inf) << ',' << sci(r.cap) << ','
           << sci(r.cap_doubled_radius) << ',' << sci(exact) << ',' << r.nodes << '\n';
    } else {
        fail(ErrorKind::ConfigError, "capacity.problem must be cells, annulus, ball or disk");
    }
    write_file(out, "capacity.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_solve_perforated(const Config& cfg, const fs::path& out) {
    ValidatedSpec spec = validate_spec(spec_from_config(cfg));
    Mesh m = refined(mesh_perforated(spec, mesh_options(cfg)), cfg);
    Source src = source_from(cfg, spec.spec());
    PerforatedSolution s = solve_perforated(m, src.as_region_function());
    export_mesh(m, out.string(), "perforated");
    fs::create_directories(out);
    export_field(m, s.u, (out / "u_perforated.txt").string());
    FemSystem sys = assemble(m);
    std::ostringstream os;
    os << "source," << src.name() << "\nnodes," << m.num_nodes() << "\niterations," << s.iterations << "\nresidual,"
       << sci(s.residual) << "\nl2_norm," << sci(std::sqrt(sys.M.quadratic_form(s.u))) << "\nh1_seminorm,"
       << sci(std::sqrt(sys.K.quadratic_form(s.u))) << '\n';
    write_file(out, "solve_perforated.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_solve_homogenized(const Config& cfg, const fs::path& out) {
    SieveSpec s = spec_from_config(cfg);
    double mu = resolve_mu(cfg, s.n);
    Mesh m = refined(mesh_homogenized(s.W, s.L, s.lateral, cfg.get_double("mesh.h", 0.05)), cfg);
    Source src = source_from(cfg, s);
    HomogenizedSolution h = solve_homogenized(m, mu, src.as_region_function());
    export_mesh(m, out.string(), "homogenized");
    fs::create_directories(out);
    export_field(m, h.u, (out / "u_homogenized.txt").string());
    std::ostringstream js;
    js << "x,jump\n";
    for (const auto& j : h.jump) js << sci(j.x) << ',' << sci(j.jump) << '\n';
    write_file(out, "jump.csv", js.str());
    std::ostringstream os;
    os << "source," << src.name() << "\nmu," << sci(mu) << "\nnodes," << m.num_nodes() << "\niterations,"
       << h.iterations << "\nresidual," << sci(h.residual) << "\nflux_defect_plus," << sci(h.flux_defect_plus)
       << "\nflux_defect_minus," << sci(h.flux_defect_minus) << '\n';
    write_file(out, "solve_homogenized.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_zeta(const Config& cfg, const fs::path& out) {
    std::ostringstream os;
    os << "eps,zeta,zeta_over_sqrt_eps,witness_quotient,closed_form_quotient\n";
    if (cfg.has("zeta.witness")) {
        WitnessKind kind = parse_witness(cfg.get_string("zeta.witness"));
        double alpha = cfg.get_double("zeta.alpha", 1.0);
        double xi = cfg.get_double("zeta.xi", 0.0);
        DomainMeshOptions mo = mesh_options(cfg);
        for (double e : cfg.get_doubles("zeta.eps")) {
            WitnessResult w = witness_quotient(kind, e, alpha, xi, mo, true);
            os << sci(e) << ',' << sci(w.zeta) << ',' << sci(w.zeta / std::sqrt(e)) << ',' << sci(w.fem) << ','
               << sci(w.closed_form) << '\n';
        }
    } else {
        SieveSpec base = spec_from_config(cfg);
        std::vector<double> eps = cfg.has("zeta.eps") ? cfg.get_doubles("zeta.eps") : std::vector<double>{base.eps};
        for (double e : eps) {
            SieveSpec s = base;
            s.eps = e;
            ValidatedSpec spec = validate_spec(s);
            Mesh m = mesh_perforated(spec, mesh_options(cfg));
            ZetaResult z = zeta(m);
            os << sci(e) << ',' << sci(z.zeta) << ',' << sci(z.zeta / std::sqrt(e)) << ",nan,nan\n";
        }
    }
    write_file(out, "zeta.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_kappa(const Config& cfg, const fs::path& out) {
    if (!cfg.has("family.p")) fail(ErrorKind::ConfigError, "kappa needs a periodic family (family.p)");
    SweepPlan plan = plan_from_config(cfg);
    std::vector<ValidatedSpec> family;
    for (double r : plan.rho) family.push_back(periodic_family(plan.p, plan.q, r, plan.n, plan.family));
    double mu = mu_value(plan.n, plan.p, plan.q);
    auto rows = kappa_sweep(family, mu, kappa_test_pair(plan.family.W, plan.family.L));
    std::ostringstream os;
    os << kappa_csv_header() << '\n';
    for (const auto& r : rows) os << kappa_csv_row(r) << '\n';
    write_file(out, "kappa.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_sweep(const Config& cfg, const fs::path& out) {
    SweepPlan plan = plan_from_config(cfg);
    ConvergenceReport rep = convergence_sweep(plan);
    write_file(out, "sweep.csv", sweep_csv(rep));
    write_file(out, "sweep_details.csv", sweep_details_csv(rep));
    std::ostringstream os;
    os << "column,slope,intercept,r2\n";
    for (int j = 0; j < 4; ++j)
        os << "err" << j + 1 << ',' << sci(rep.err_rates[j].slope) << ',' << sci(rep.err_rates[j].intercept) << ','
           << sci(rep.err_rates[j].r2) << '\n';
    os << "zeta_sqrt_eps_constant," << sci(rep.zeta_constant) << ",nan,nan\n";
    write_file(out, "rates.csv", os.str());
    std::cout << sweep_csv(rep);
    return 0;
}

int cmd_spectrum(const Config& cfg, const fs::path& out) {
    ValidatedSpec spec = validate_spec(spec_from_config(cfg));
    const int k = static_cast<int>(cfg.get_int("spectral.k", 5));
    double mu = resolve_mu(cfg, spec->n);
    Mesh P0 = mesh_perforated(spec, mesh_options(cfg));
    Mesh P = refined(P0, cfg);
    Mesh H = refined(mesh_homogenized(spec->W, spec->L, spec->lateral, cfg.get_double("mesh.h", 0.05)), cfg);
    SpectrumReport sp = perforated_spectrum(P, k), sh = homogenized_spectrum(H, mu, k);
    sp.eps = sh.eps = spec->eps;
    double z = zeta(P0).zeta;
    double kap = spec->passages.empty() ? 0.0 : compare_forms(spec, mu, kappa_test_pair(spec->W, spec->L)).kappa;
    double sigma = scale_report(spec, z, kap).sigma;
    auto rows = spectral_gap_report({spec->eps}, {sp}, {sh}, {sigma});
    std::ostringstream os;
    os << spectral_csv_header(k) << '\n' << spectral_csv_row(rows.front()) << '\n';
    write_file(out, "spectrum.csv", os.str());
    std::cout << os.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neumann sieve laboratory"};
    app.require_subcommand(1);
    struct Command {
        const char* name;
        const char* help;
        std::function<int(const Config&, const fs::path&)> run;
    };
    const Command commands[] = {
        {"validate", "check a domain specification against the admissibility constraints", cmd_validate},
        {"mesh", "mesh the perforated domain, one cell or the homogenized strip", cmd_mesh},
        {"capacity", "cell capacities, or the annulus / axisymmetric Newton capacity oracles", cmd_capacity},
        {"solve-perforated", "resolvent problem on the perforated domain", cmd_solve_perforated},
        {"solve-homogenized", "resolvent problem with the interface condition", cmd_solve_homogenized},
        {"zeta", "non-concentration constant (or a witness study)", cmd_zeta},
        {"kappa", "interface form comparison along a periodic family", cmd_kappa},
        {"sweep", "convergence sweep along a periodic family", cmd_sweep},
        {"spectrum", "low spectra and their weighted Hausdorff distance", cmd_spectrum},
    };
    std::string config_path, out_dir;
    const Command* chosen = nullptr;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->callback([&chosen, &c] { chosen = &c; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        Config cfg = Config::load(config_path);
        return chosen->run(cfg, fs::path(out_dir));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (classify(e.kind())) {
        case ErrorClass::Validation: return 2;
        case ErrorClass::Solver: return 3;
        case ErrorClass::Other: return 1;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

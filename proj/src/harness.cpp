#include "sieve/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "sieve/capacity.hpp"
#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/fem.hpp"
#include "sieve/interface_form.hpp"
#include "sieve/noncon.hpp"
#include "sieve/parallel.hpp"
#include "sieve/spectral.hpp"

namespace sieve {

namespace {

bool plus_side(int tag) {
    auto k = region_kind(tag);
    return k == RegionKind::OmegaPlus || k == RegionKind::GuardPlus;
}
bool minus_side(int tag) {
    auto k = region_kind(tag);
    return k == RegionKind::OmegaMinus || k == RegionKind::GuardMinus;
}

BrokenField negated(BrokenField f) {
    for (auto& c : f.corner)
        for (double& v : c) v = -v;
    return f;
}

ValidatedSpec family_member(const SweepPlan& plan, double rho) {
    return periodic_family(plan.p, plan.q, rho, plan.n, plan.family);
}

struct Solves {
    std::vector<double> ue, u, u2;
};

Solves solve_all(const SweepPlan& plan, const Mesh& P, const Mesh& H, const RegionFunction& f, double mu,
                 const std::vector<Polygon>& walls) {
    Solves s;
    s.ue = solve_perforated(P, f, plan.solver).u;
    HomogenizedOptions ho;
    ho.solver = plan.solver;
    s.u = solve_homogenized(H, mu, f, ho).u;
    ho.zero_regions = walls;
    s.u2 = solve_homogenized(H, mu, f, ho).u;
    return s;
}

// Estimated L2 error of the finer of two nested solutions (second order: |u_h - u_h/2| / 3).
double richardson(const Mesh& coarse, const Mesh& fine, const std::vector<double>& uc, const std::vector<double>& uf) {
    std::vector<double> d = prolongate(coarse, fine, uc);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= uf[i];
    return std::sqrt(std::max(assemble_mass(fine, {}).quadratic_form(d), 0.0)) / 3.0;
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

std::vector<double> plan_eps(const SweepPlan& plan) {
    std::vector<double> e;
    for (double r : plan.rho) e.push_back(family_member(plan, r)->eps);
    return e;
}

void check_plan(const SweepPlan& plan) {
    if (plan.rho.size() < 3) fail(ErrorKind::ConfigError, "a sweep needs at least three points");
    if (!(plan.h > 0.0)) fail(ErrorKind::ConfigError, "mesh.h must be positive");
    if (plan.refinements < 1) fail(ErrorKind::ConfigError, "mesh.refinements must be at least 1");
    if (plan.spectral_k < 1) fail(ErrorKind::ConfigError, "spectral.k must be at least 1");
    std::vector<double> e = plan_eps(plan);
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i] < e[i - 1])) fail(ErrorKind::ConfigError, "eps must strictly decrease along the sweep");
    make_source(plan.source, plan.family.W, plan.family.L, plan.source_value);
}

SweepPlan plan_from_config(const Config& cfg) {
    SweepPlan p;
    p.p = cfg.get_double("family.p", p.p);
    p.q = cfg.get_double("family.q", p.q);
    p.n = static_cast<int>(cfg.get_int("domain.n", p.n));
    p.family.W = cfg.get_double("domain.W", p.family.W);
    p.family.L = cfg.get_double("domain.L", p.family.L);
    std::string lat = cfg.get_string("domain.lateral", "periodic");
    if (lat != "periodic" && lat != "neumann") fail(ErrorKind::ConfigError, "domain.lateral must be 'periodic' or 'neumann'");
    p.family.lateral = lat == "neumann" ? Lateral::Neumann : Lateral::Periodic;
    if (!cfg.has("sweep.rho")) fail(ErrorKind::ConfigError, "missing key 'sweep.rho'");
    p.rho = cfg.get_doubles("sweep.rho");
    p.source = cfg.get_string("source.name", p.source);
    p.source_value = cfg.get_double("source.value", p.source_value);
    p.h = cfg.get_double("mesh.h", p.h);
    p.refinements = static_cast<int>(cfg.get_int("mesh.refinements", p.refinements));
    p.errors = cfg.get_bool("sweep.errors", p.errors);
    p.correctors = cfg.get_bool("sweep.correctors", p.correctors);
    p.spectra = cfg.get_bool("sweep.spectra", p.spectra);
    p.zeta = cfg.get_bool("sweep.zeta", p.zeta);
    p.kappa = cfg.get_bool("sweep.kappa", p.kappa);
    p.control_row = cfg.get_bool("sweep.control", p.control_row);
    p.spectral_k = static_cast<int>(cfg.get_int("spectral.k", p.spectral_k));
    p.solver.rel_tol = cfg.get_double("solver.rel_tol", p.solver.rel_tol);
    p.solver.accept_tol = cfg.get_double("solver.accept_tol", p.solver.accept_tol);
    p.solver.max_iter = static_cast<int>(cfg.get_int("solver.max_iter", p.solver.max_iter));
    check_plan(p);
    return p;
}

std::string SweepRow::flags() const {
    std::string f;
    if (control) f = "control";
    if (under_resolved) f += f.empty() ? "under_resolved" : ";under_resolved";
    return f.empty() ? "ok" : f;
}

RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3) fail(ErrorKind::NonPositiveData, "rate fit needs at least 3 paired points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) fail(ErrorKind::NonPositiveData, "rate fit needs positive data");
        double x = std::log(xs[i]), y = std::log(ys[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) fail(ErrorKind::NonPositiveData, "rate fit needs distinct abscissae");
    RateFit r;
    r.slope = (n * sxy - sx * sy) / den;
    r.intercept = (sy - r.slope * sx) / n;
    double mean = sy / n, ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double x = std::log(xs[i]), y = std::log(ys[i]);
        double fit = r.intercept + r.slope * x;
        ss_tot += (y - mean) * (y - mean);
        ss_res += (y - fit) * (y - fit);
    }
    r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return r;
}

SweepRow sweep_point(const SweepPlan& plan, double rho, const std::optional<Source>& source_override) {
    const ValidatedSpec spec = family_member(plan, rho);
    const Source src = source_override ? *source_override
                                       : make_source(plan.source, spec->W, spec->L, plan.source_value);
    const RegionFunction f = src.as_region_function();
    const double mu = mu_value(plan.n, plan.p, plan.q);
    const int npass = static_cast<int>(spec->passages.size());

    SweepRow row;
    row.eps = spec->eps;
    row.rho = rho;
    row.mu = mu;
    row.source_norm = src.l2_norm();

    DomainMeshOptions mo;
    mo.h = plan.h;
    Mesh P0 = mesh_perforated(spec, mo);
    Mesh H0 = mesh_homogenized(spec->W, spec->L, spec->lateral, plan.h);
    Mesh Pc = P0, Hc = H0;
    for (int r = 1; r < plan.refinements; ++r) {
        Pc = refine_uniform(Pc);
        Hc = refine_uniform(Hc);
    }
    Mesh P = refine_uniform(Pc), H = refine_uniform(Hc);
    row.nodes_perforated = P.num_nodes();
    row.nodes_homogenized = H.num_nodes();

    const auto walls = build_cells(spec).sieve_pieces;
    Solves fine = solve_all(plan, P, H, f, mu, walls);
    Supermesh overlay(P, H);

    if (plan.errors) {
        double e1 = std::sqrt(overlay.difference(fine.ue, nullptr, fine.u).l2_sq);
        double e3 = std::sqrt(overlay.difference(fine.ue, nullptr, fine.u2).l2_sq);
        double wall_u = l2_sq_over_polygons(H, fine.u, walls);
        double wall_u2 = l2_sq_over_polygons(H, fine.u2, walls);
        row.err[0] = e1;
        row.err[1] = std::sqrt(e3 * e3 + wall_u2);
        row.err[2] = e3;
        row.err[3] = std::sqrt(e1 * e1 + wall_u);

        Solves coarse = solve_all(plan, Pc, Hc, f, mu, walls);
        row.richardson_perforated = richardson(Pc, P, coarse.ue, fine.ue);
        row.richardson_homogenized = std::max(richardson(Hc, H, coarse.u, fine.u), richardson(Hc, H, coarse.u2, fine.u2));
        double smallest = *std::min_element(row.err, row.err + 4);
        double estimate = std::max(row.richardson_perforated, row.richardson_homogenized);
        // A vanishing discrepancy (constant or zero source) is resolved when the estimate vanishes too.
        row.under_resolved = estimate > 0.2 * smallest && estimate > 1e-12 * (1.0 + row.source_norm);
    }

    if (plan.correctors && npass > 0) {
        CellPotentials cells = cell_potentials(P, npass, plan.solver);
        Correctors c = build_correctors(overlay, cells, fine.u);
        CorrectorReport& cr = row.correctors;
        BrokenField kp = negated(c.plus), km = negated(c.minus);
        auto dp = overlay.difference(fine.ue, &kp, fine.u, plus_side);
        auto dm = overlay.difference(fine.ue, &km, fine.u, minus_side);
        BrokenField dT = broken_from_nodal(P, fine.ue);
        for (std::size_t t = 0; t < dT.corner.size(); ++t)
            for (int j = 0; j < 3; ++j) dT.corner[t][j] -= c.passage.corner[t][j];
        cr.h1_plus = std::sqrt(dp.l2_sq + dp.h1_semi_sq);
        cr.h1_minus = std::sqrt(dm.l2_sq + dm.h1_semi_sq);
        cr.h1_T = std::sqrt(broken_l2_sq(P, dT, is_passage_tag) + broken_h1_semi_sq(P, dT, is_passage_tag));
        cr.gradient_energy = c.energy_plus + c.energy_minus + c.energy_passage;
        cr.capacity_energy = c.energy_sum;
        cr.jump_energy = interface_coupling(H, mu).quadratic_form(fine.u);
        cr.energy_defect = cr.jump_energy > 0.0 ? std::abs(cr.gradient_energy - cr.jump_energy) / cr.jump_energy : 0.0;
        const double fn = row.source_norm > 0.0 ? row.source_norm : 1.0;
        cr.l2_plus = std::sqrt(broken_l2_sq(P, c.plus, plus_side)) / fn;
        cr.l2_minus = std::sqrt(broken_l2_sq(P, c.minus, minus_side)) / fn;
        cr.l2_T = std::sqrt(broken_l2_sq(P, c.passage, is_passage_tag)) / fn;
    }

    if (plan.zeta) row.zeta = zeta(P0).zeta;
    if (plan.kappa) row.kappa = compare_forms(spec, mu, kappa_test_pair(spec->W, spec->L)).kappa;
    ScaleReport sr = scale_report(spec, row.zeta, row.kappa);
    row.sqrt_eps = sr.sqrt_eps;
    row.chi = sr.chi;
    row.sigma = sr.sigma;

    if (plan.spectra) {
        SpectrumReport sp = perforated_spectrum(P, plan.spectral_k);
        SpectrumReport sh = homogenized_spectrum(H, mu, plan.spectral_k);
        HausdorffResult d = weighted_hausdorff(sp.values, sh.values);
        row.spectrum_perforated = sp.values;
        row.spectrum_homogenized = sh.values;
        row.dist_spec = d.value;
        row.dist_uncertainty = d.uncertainty;
    }
    return row;
}

ConvergenceReport convergence_sweep(const SweepPlan& plan) {
    check_plan(plan);
    ConvergenceReport rep;
    rep.plan = plan;
    const std::size_t n = plan.rho.size();
    const std::size_t jobs = n + (plan.control_row ? 1 : 0);
    std::vector<SweepRow> rows(jobs);
    parallel_for(
        jobs,
        [&](std::size_t i) {
            if (i < n) {
                rows[i] = sweep_point(plan, plan.rho[i]);
            } else {
                SweepPlan cp = plan;
                cp.correctors = cp.spectra = cp.zeta = cp.kappa = false;
                Source c = make_source("constant", plan.family.W, plan.family.L, plan.source_value);
                rows[i] = sweep_point(cp, plan.rho.back(), c);
                rows[i].control = true;
            }
        },
        plan.workers);
    rep.rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n));
    if (plan.control_row) rep.control = rows.back();

    std::vector<double> eps;
    for (const auto& r : rep.rows) eps.push_back(r.eps);
    for (int j = 0; j < 4; ++j) {
        std::vector<double> e;
        for (const auto& r : rep.rows) e.push_back(r.err[j]);
        try {
            rep.err_rates[j] = rate_fit(eps, e);
        } catch (const Error&) {
            rep.err_rates[j] = {};
        }
    }
    double num = 0.0, den = 0.0;
    for (const auto& r : rep.rows) {
        num += r.zeta * r.sqrt_eps;
        den += r.eps;
    }
    rep.zeta_constant = den > 0.0 ? num / den : 0.0;
    return rep;
}

std::string sweep_csv_header() {
    return "eps,err1,err2,err3,err4,sqrt_eps,zeta,kappa,chi,sigma,corr_h1_plus,corr_h1_minus,corr_h1_T,"
           "energy_defect,dist_spec,flags";
}

std::string sweep_csv_row(const SweepRow& r) {
    std::ostringstream os;
    os << sci(r.eps);
    for (double e : r.err) os << ',' << sci(e);
    for (double v : {r.sqrt_eps, r.zeta, r.kappa, r.chi, r.sigma, r.correctors.h1_plus, r.correctors.h1_minus,
                     r.correctors.h1_T, r.correctors.energy_defect, r.dist_spec})
        os << ',' << sci(v);
    os << ',' << r.flags();
    return os.str();
}

std::string sweep_csv(const ConvergenceReport& rep) {
    std::string out = sweep_csv_header() + "\n";
    for (const auto& r : rep.rows) out += sweep_csv_row(r) + "\n";
    if (rep.control) out += sweep_csv_row(*rep.control) + "\n";
    return out;
}

std::string sweep_details_csv(const ConvergenceReport& rep) {
    const int k = rep.plan.spectral_k;
    std::ostringstream os;
    os << "eps,rho,mu,source_norm,richardson_perforated,richardson_homogenized,corr_l2_plus,corr_l2_minus,corr_l2_T,"
          "gradient_energy,capacity_energy,jump_energy,dist_uncertainty,nodes_perforated,nodes_homogenized";
    for (int i = 1; i <= k; ++i) os << ",lp" << i;
    for (int i = 1; i <= k; ++i) os << ",lh" << i;
    os << ",flags\n";
    auto emit = [&](const SweepRow& r) {
        os << sci(r.eps) << ',' << sci(r.rho) << ',' << sci(r.mu) << ',' << sci(r.source_norm) << ','
           << sci(r.richardson_perforated) << ',' << sci(r.richardson_homogenized) << ',' << sci(r.correctors.l2_plus)
           << ',' << sci(r.correctors.l2_minus) << ',' << sci(r.correctors.l2_T) << ','
           << sci(r.correctors.gradient_energy) << ',' << sci(r.correctors.capacity_energy) << ','
           << sci(r.correctors.jump_energy) << ',' << sci(r.dist_uncertainty) << ',' << r.nodes_perforated << ','
           << r.nodes_homogenized;
        for (int i = 0; i < k; ++i)
            os << ',' << sci(i < static_cast<int>(r.spectrum_perforated.size()) ? r.spectrum_perforated[i] : 0.0);
        for (int i = 0; i < k; ++i)
            os << ',' << sci(i < static_cast<int>(r.spectrum_homogenized.size()) ? r.spectrum_homogenized[i] : 0.0);
        os << ',' << r.flags() << '\n';
    };
    for (const auto& r : rep.rows) emit(r);
    if (rep.control) emit(*rep.control);
    return os.str();
}

}  // namespace sieve

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sieve/config.hpp"
#include "sieve/geometry.hpp"
#include "sieve/numerics.hpp"
#include "sieve/solvers.hpp"

namespace sieve {

// What a sweep computes for a periodic straight-passage family.
struct SweepPlan {
    double p = 1.0;
    double q = std::numeric_limits<double>::infinity();
    int n = 2;
    FamilyOptions family;
    std::vector<double> rho;             // one family member per value; eps must strictly decrease
    std::string source = "upper";        // source catalog name (see make_source)
    double source_value = 1.0;
    double h = 0.05;                     // bulk mesh size of the base meshes
    int refinements = 1;                 // solves run on the base meshes refined this many times (>= 1)
    bool errors = true;                  // err1..err4 with the under-resolution gate
    bool correctors = true;              // corrector defects
    bool spectra = true;                 // weighted Hausdorff distance
    bool zeta = true;
    bool kappa = true;
    int spectral_k = 5;
    bool control_row = true;             // f = const on the finest member
    int workers = 0;                     // 0: worker_count()
    SolverOptions solver{.rel_tol = 1e-12, .accept_tol = 1e-10};
};

// Reads `family.*`, `domain.*`, `sweep.*`, `source.*`, `mesh.*` and `spectral.*` keys.
// Throws ConfigError on fewer than three points or when eps does not strictly decrease.
SweepPlan plan_from_config(const Config& cfg);
void check_plan(const SweepPlan& plan);
std::vector<double> plan_eps(const SweepPlan& plan);

struct CorrectorReport {
    double h1_plus = 0.0, h1_minus = 0.0, h1_T = 0.0;       // H1 defects of the corrected approximations
    double gradient_energy = 0.0;                          // sum of the corrector gradient energies
    double capacity_energy = 0.0;                          // sum_k C_k (<g>_{B-} - <g>_{B+})^2
    double jump_energy = 0.0;                              // ||mu^(1/2) [g]||^2 on Gamma
    double energy_defect = 0.0;                            // |gradient - jump| / jump
    double l2_plus = 0.0, l2_minus = 0.0, l2_T = 0.0;      // corrector L2 norms divided by ||f||
};

struct SweepRow {
    double eps = 0.0, rho = 0.0, mu = 0.0;
    double err[4] = {0.0, 0.0, 0.0, 0.0};
    double sqrt_eps = 0.0, zeta = 0.0, kappa = 0.0, chi = 0.0, sigma = 0.0;
    CorrectorReport correctors;
    double dist_spec = 0.0, dist_uncertainty = 0.0;
    std::vector<double> spectrum_perforated, spectrum_homogenized;
    double richardson_perforated = 0.0, richardson_homogenized = 0.0;
    double source_norm = 0.0;
    std::size_t nodes_perforated = 0, nodes_homogenized = 0;
    bool under_resolved = false;
    bool control = false;
    std::string flags() const;
};

struct RateFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};
// Least squares on (ln x, ln y). Throws NonPositiveData for fewer than 3 points or non-positive data.
RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct ConvergenceReport {
    SweepPlan plan;
    std::vector<SweepRow> rows;          // in plan order (eps decreasing)
    std::optional<SweepRow> control;
    RateFit err_rates[4];                // log err against log eps (when all positive)
    double zeta_constant = 0.0;          // least-squares C in zeta ~ C eps^(1/2) (straight-passage bound)
};

// Computes one family member. With `source_override` the plan's source is replaced.
SweepRow sweep_point(const SweepPlan& plan, double rho, const std::optional<Source>& source_override = {});
ConvergenceReport convergence_sweep(const SweepPlan& plan);

// CSV with the fixed column order; scientific notation, LF endings. The control row (flags
// "control") comes last.
std::string sweep_csv(const ConvergenceReport& report);
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);
// Supplementary columns (Richardson estimates, corrector L2 ratios, spectra, node counts).
std::string sweep_details_csv(const ConvergenceReport& report);

}  // namespace sieve

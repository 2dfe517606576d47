#pragma once

#include <string>
#include <vector>

#include "sieve/domain.hpp"
#include "sieve/fem.hpp"
#include "sieve/geometry.hpp"
#include "sieve/mesh.hpp"
#include "sieve/numerics.hpp"

namespace sieve {

struct CapacityResult {
    double value = 0.0;          // energy of the discrete minimizer
    double flux_value = 0.0;     // reaction sum over the nodes held at 1
    double residual = 0.0;       // relative residual of the reduced solve
    double symmetry_defect = -1.0;  // max |U(x',x_n) + U(x',-x_n) - 1|; negative when not symmetric
    double min_U = 0.0, max_U = 0.0;
    double energy_plus = 0.0, energy_passage = 0.0, energy_minus = 0.0;  // split by cell region
    std::vector<double> U;
    Mesh mesh;
};

struct CapacityOptions {
    DomainMeshOptions mesh{.h = 0.0, .h_neck = 0.0, .grading = 0.25};  // zero sizes select the fractions below
    double bulk_fraction = 1.0 / 16.0;  // of the guard radius
    double neck_fraction = 1.0 / 8.0;   // of the smallest passage feature
    SolverOptions solver;
};

// Minimizes the Dirichlet energy with U = 1 on `one`, U = 0 on `zero`, natural conditions elsewhere.
CapacityResult solve_capacity(Mesh mesh, const std::vector<int>& one, const std::vector<int>& zero,
                              const SolverOptions& solver = {});

// Capacity of the cell G_k (U = 1 on S+, U = 0 on S-).
CapacityResult cell_capacity(const ValidatedSpec& spec, int k, const CapacityOptions& opts = {});
CapacityResult cell_capacity(Mesh cell_mesh, const SolverOptions& solver = {});

// Annulus a < |x| < b with U = 1 inside and 0 outside; exact value 2 pi / ln(b/a).
double annulus_capacity_exact(double a, double b);
CapacityResult annulus_capacity(double a, double b, double h, double h_inner, int segments = 256);

// Leading-order cell capacity pi p / (2 + pi p / q) * rho (q may be +infinity).
double capacity_asym_2d(double p, double q, double rho);

// Axisymmetric three-dimensional problems in the meridian half-plane (r, z), r >= 0.
struct AxisymOptions {
    double R_inf = 50.0;
    double h_near_fraction = 1.0 / 160.0;  // size at the singular features relative to the object size
    double grading = 0.08;
    double h_far_fraction = 0.1;          // bulk size relative to R_inf
    int arc_segments = 128;
    bool check_truncation = true;         // also solve with 2 R_inf and require < 1% change
};

enum class NewtonProfile { Disk, Ball };

struct NewtonResult {
    double cap = 0.0;               // twice the half-space energy
    double cap_doubled_radius = 0.0;  // same with 2 R_inf (0 when not checked)
    std::size_t nodes = 0;
};

// Newton capacity of a flat disk of radius `size` or a ball of radius `size`, with the monopole
// Robin condition dH/dr + H/r = 0 at the truncation sphere. Throws TruncationTooSmall.
NewtonResult newton_capacity_axisym(NewtonProfile profile, double size, const AxisymOptions& opts = {});

// C(D, p, q) for the unit disk D: energy of the potential of the half-space with a cylindrical
// well of depth p/q, held at 1 on the bottom of the well.
double capacity_disk_well(double p, double q, const AxisymOptions& opts = {});

// Interface strength for the periodic family. n = 2: pi p / (2 + pi p / q); n = 3: (p/4) cap(D)
// for q = infinity and (p/2) C(D, p, q) otherwise. p = 0 or q = 0 gives 0.
double mu_value(int n, double p, double q, const std::string& cross_section = "disk", const AxisymOptions& opts = {});

struct CapacityBound {
    double trial_energy = 0.0;    // |T| / (4 eps^2), energy of the linear trial function
    double min_expression = 0.0;  // min{gamma- rho^{n-1}, gamma+ rho^{n-1}, |T| eps^{-2}}
};
CapacityBound capacity_bound(double area_T, double eps, double gamma_plus, double gamma_minus, double rho, int n);

// One CSV row per cell: k, d+, d-, rho, eps, C, flux C, bound, asymptotic, symmetry defect.
std::string capacity_csv_header();
std::string capacity_csv_row(int k, double d_plus, double d_minus, double rho, double eps, const CapacityResult& r,
                             double bound, double asymptotic);

}  // namespace sieve

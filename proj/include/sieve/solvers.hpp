#pragma once

#include <string>
#include <vector>

#include "sieve/fem.hpp"
#include "sieve/geometry.hpp"
#include "sieve/mesh.hpp"
#include "sieve/numerics.hpp"

namespace sieve {

// Fixed catalog of right-hand sides on the strip (-W,W) x (-L,L), each with an analytic L2 norm.
//   zero      f = 0
//   constant  f = c
//   upper     f = 1 for x_n > 0, 0 otherwise
//   sign      f = sign(x_n)
//   trig      f = cos(pi x1 / W) + sin(pi x_n / (2L))
enum class SourceKind { Zero, Constant, Upper, Sign, Trig };

struct Source {
    SourceKind kind = SourceKind::Constant;
    double value = 1.0;   // constant value / amplitude
    double W = 0.5, L = 1.0;

    double operator()(Vec2 x) const;
    double l2_norm() const;   // over the whole strip
    std::string name() const;
    RegionFunction as_region_function() const;
};

Source make_source(const std::string& name, double W, double L, double value = 1.0);

struct PerforatedSolution {
    std::vector<double> u;
    double residual = 0.0;
    int iterations = 0;
};

// (K + M) u = b with b_i = int f phi_i on the perforated mesh; periodic sides share dofs.
PerforatedSolution solve_perforated(const Mesh& mesh, const RegionFunction& f, const SolverOptions& opts = {});

struct HomogenizedOptions {
    SolverOptions solver;
    // The source is set to zero inside these convex polygons (extension by zero over the wall).
    std::vector<Polygon> zero_regions;
};

struct JumpSample {
    double x = 0.0;
    double jump = 0.0;   // u+ - u-
};

struct HomogenizedSolution {
    std::vector<double> u;          // two-valued along Gamma
    double mu = 0.0;
    std::vector<JumpSample> jump;   // at the upper trace nodes, sorted by x
    // Relative L2(Gamma) mismatch of d u+/d x_n and d u-/d x_n against mu [u], per side.
    double flux_defect_plus = 0.0, flux_defect_minus = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// (K + M + C_mu) u = b on the Gamma-doubled mesh.
HomogenizedSolution solve_homogenized(const Mesh& mesh, double mu, const RegionFunction& f,
                                      const HomogenizedOptions& opts = {});

// Load vector of f with the given convex polygons removed from the integration domain.
std::vector<double> load_vector_excluding(const Mesh& mesh, const RegionFunction& f,
                                          const std::vector<Polygon>& excluded);

// Value of a field on the Gamma-doubled mesh. side: +1 upper, -1 lower, 0 none (throws
// PointOnInterface on x_n = 0).
double evaluate_homogenized(const PointLocator& locator, const std::vector<double>& u, Vec2 p, int side = 0);

// J_eps: side-aware restriction of a homogenized field to the perforated mesh, per triangle corner.
BrokenField restrict_to_perforated(const Mesh& hom, const std::vector<double>& u, const Mesh& perforated);

// Nodal prolongation of a field from a mesh onto a nested refinement (side aware through tags).
std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine, const std::vector<double>& u);

// Exact overlay of a perforated mesh with a homogenized (Gamma-doubled) mesh. Perforated triangles
// are paired with homogenized triangles of the same side of Gamma.
class Supermesh {
public:
    // Throws GridMismatch when the overlaps do not cover the perforated mesh.
    Supermesh(const Mesh& perforated, const Mesh& hom);

    struct Difference {
        double l2_sq = 0.0;
        double h1_semi_sq = 0.0;
    };
    // int (a + k - b)^2 and int |grad(a + k - b)|^2 over perforated triangles accepted by the predicate;
    // a is nodal on the perforated mesh (may be empty), k broken on it (may be null), b nodal on hom (may be empty).
    Difference difference(const std::vector<double>& a, const BrokenField* k, const std::vector<double>& b,
                          const std::function<bool(int)>& perforated_region = {}) const;
    // Integral of b over the perforated triangles, accumulated into bins chosen by `bin_of(tag)` (-1 skips).
    std::vector<double> integrals_by_region(const std::vector<double>& b, const std::function<int(int)>& bin_of,
                                            int bins) const;
    double covered_area() const { return covered_; }
    std::size_t overlaps() const { return pairs_.size(); }
    const Mesh& perforated() const { return *perf_; }
    const Mesh& hom() const { return *hom_; }

private:
    const Mesh* perf_;
    const Mesh* hom_;
    std::vector<std::pair<int, int>> pairs_;   // (perforated triangle, hom triangle)
    double covered_ = 0.0;
};

// Squared L2 norm of a homogenized P1 field over the union of convex polygons.
double l2_sq_over_polygons(const Mesh& hom, const std::vector<double>& b, const std::vector<Polygon>& polygons);

// Extension by zero from Omega_eps to Omega: the L2 norm over Omega equals the perforated norm,
// computed through the overlay so that the identity checks the transfer.
struct ZeroExtension {
    double l2 = 0.0;             // || J~ u ||_{L2(Omega)}
    double perforated_l2 = 0.0;  // || u ||_{L2(Omega_eps)} on its own mesh
};
ZeroExtension extend_by_zero(const Supermesh& overlay, const std::vector<double>& u);

// Cell potentials U_k solved on the cells of the perforated mesh (aligned mode).
struct CellPotentials {
    std::vector<double> U;          // nodal on the perforated mesh; meaningful on cell triangles
    std::vector<double> capacity;   // per passage
};
CellPotentials cell_potentials(const Mesh& perforated, int passages, const SolverOptions& opts = {});

struct Correctors {
    BrokenField plus, minus, passage;   // K+, K-, K^T as per-corner fields on the perforated mesh
    std::vector<double> mean_plus, mean_minus, capacity;
    double energy_sum = 0.0;            // sum_k C_k (<g>_{B-} - <g>_{B+})^2
    double energy_plus = 0.0, energy_minus = 0.0, energy_passage = 0.0;  // measured gradient energies
};
// Throws MissingPotential when the potentials do not match the mesh.
Correctors build_correctors(const Supermesh& overlay, const CellPotentials& cells, const std::vector<double>& g);

}  // namespace sieve

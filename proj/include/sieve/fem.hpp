#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sieve/geometry.hpp"
#include "sieve/mesh.hpp"
#include "sieve/numerics.hpp"

namespace sieve {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Element matrices of P1 on the triangle (a, b, c).
Mat3 element_stiffness(Vec2 a, Vec2 b, Vec2 c);
Mat3 element_mass(Vec2 a, Vec2 b, Vec2 c);

// Identification of mesh nodes into degrees of freedom (periodic sides share dofs).
struct DofMap {
    std::vector<int> node_to_dof;
    int ndof = 0;

    static DofMap identity(std::size_t nodes);
    static DofMap periodic(const Mesh& mesh);
    bool trivial() const { return ndof == static_cast<int>(node_to_dof.size()); }
    std::vector<double> expand(const std::vector<double>& dof_values) const;    // dof -> node
    std::vector<double> gather(const std::vector<double>& node_load) const;     // summed node -> dof
    std::vector<double> pick(const std::vector<double>& node_values) const;     // node -> dof (representative)
    CsrMatrix condense(const CsrMatrix& node_matrix) const;
};

struct AssemblyOptions {
    // Multiply integrands by the first coordinate (meridian half-plane of an axisymmetric problem).
    bool axisymmetric = false;
    // Only triangles whose region tag satisfies the predicate contribute (default: all).
    std::function<bool(int)> region_filter;
};

struct FemSystem {
    const Mesh* mesh = nullptr;
    CsrMatrix K;   // stiffness
    CsrMatrix M;   // mass
    std::size_t num_nodes() const { return mesh ? mesh->num_nodes() : 0; }
};

// Exact P1 assembly. Throws DegenerateTriangle for triangles with area below 1e-14 of their bounding box.
FemSystem assemble(const Mesh& mesh, const AssemblyOptions& opts = {});
CsrMatrix assemble_mass(const Mesh& mesh, const std::function<bool(int)>& region_filter);

// Quadratic form of the interface term: f^T C f = int_Gamma mu |f+ - f-|^2, with mu given at the
// upper trace nodes (indexed by mesh node) and integrated exactly for piecewise-linear mu.
CsrMatrix interface_coupling(const Mesh& mesh, const std::vector<double>& mu_nodal);
CsrMatrix interface_coupling(const Mesh& mesh, double mu);

// Boundary mass int_{edges} w phi_i phi_j over edges whose marker satisfies the predicate.
CsrMatrix boundary_mass(const Mesh& mesh, const std::function<bool(int)>& marker_pred, bool axisymmetric = false);

// Dirichlet constraints by elimination with a lifting field.
struct DirichletSystem {
    CsrMatrix A;                 // free-free block
    std::vector<int> free;       // free indices (ascending)
    std::vector<int> fixed;      // fixed indices (ascending)
    std::vector<double> lift;    // full-length vector with the prescribed values on fixed indices
    std::vector<double> rhs_shift;  // -A_free,fixed * lift_fixed
    std::vector<double> expand(const std::vector<double>& free_values) const;
};
DirichletSystem constrain_dirichlet(const CsrMatrix& A, const std::vector<int>& fixed, const std::vector<double>& values);
std::vector<double> solve_dirichlet(const CsrMatrix& A, const std::vector<double>& b, const std::vector<int>& fixed,
                                    const std::vector<double>& values, const SolverOptions& opts = {});

struct Norms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h1 = 0.0;
    double jump = 0.0;
};
Norms norms(const FemSystem& sys, const std::vector<double>& f, const CsrMatrix* coupling = nullptr);

// Exact integral and mean of a P1 field over triangles with accepted tags. Mean throws EmptyRegion.
double integrate_field(const Mesh& mesh, const std::vector<double>& f, const std::function<bool(int)>& region_pred);
double mean_over_region(const Mesh& mesh, const std::vector<double>& f, const std::function<bool(int)>& region_pred);
double mean_over_region(const Mesh& mesh, const std::vector<double>& f, int region_tag);

// Exact integral of a P1 field over a convex polygon, restricted to triangles with accepted tags.
struct PolygonIntegral {
    double integral = 0.0;
    double area = 0.0;
};
PolygonIntegral integrate_over_polygon(const PointLocator& locator, const std::vector<double>& f, const Polygon& convex,
                                       const std::function<bool(int)>& region_pred = {});

// Load vector b_i = int f phi_i (degree-5 quadrature); f receives the point and the triangle tag.
using RegionFunction = std::function<double(Vec2, int)>;
std::vector<double> load_vector(const Mesh& mesh, const RegionFunction& f, const AssemblyOptions& opts = {});
std::vector<double> interpolate(const Mesh& mesh, const std::function<double(Vec2)>& f);

// Piecewise-linear field that may jump between triangles (values per triangle corner).
struct BrokenField {
    std::vector<std::array<double, 3>> corner;
};
BrokenField broken_from_nodal(const Mesh& mesh, const std::vector<double>& f);
double broken_l2_sq(const Mesh& mesh, const BrokenField& f, const std::function<bool(int)>& region_pred = {});
double broken_h1_semi_sq(const Mesh& mesh, const BrokenField& f, const std::function<bool(int)>& region_pred = {});

}  // namespace sieve

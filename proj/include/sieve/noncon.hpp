#pragma once

#include <string>
#include <vector>

#include "sieve/domain.hpp"
#include "sieve/geometry.hpp"
#include "sieve/mesh.hpp"
#include "sieve/numerics.hpp"

namespace sieve {

struct ZetaResult {
    double zeta = 0.0;              // sqrt of the top eigenvalue of M_T u = lambda (K + M) u
    std::vector<double> field;      // maximizer, nodal, normalized in the H1 norm
    double residual = 0.0;
};

// Non-concentration constant of a perforated mesh (periodic sides share degrees of freedom).
ZetaResult zeta(const Mesh& mesh, const EigOptions& opts = {});

// Rayleigh quotient ||v||_{L2(passages)} / ||v||_{H1} of a nodal field.
double passage_quotient(const Mesh& mesh, const std::vector<double>& v);

enum class WitnessKind { Bridge, Bump };
WitnessKind parse_witness(const std::string& name);

struct WitnessNorms {
    double l2_sq = 0.0;     // ||v||^2 over the passage
    double grad_sq = 0.0;   // ||grad v||^2
    double quotient() const;
};

// Closed-form norms of the explicit witnesses. For the bump, xi <= 0 selects eps / 2.
WitnessNorms witness_closed_form(WitnessKind kind, double eps, double alpha, double xi = 0.0);

// Single passage of the witness geometry centered at x1 = 0 on a Neumann strip.
ValidatedSpec witness_spec(WitnessKind kind, double eps, double alpha, double xi = 0.0, double W = 0.5, double L = 1.0);

// Nodal interpolant of the witness on a mesh of witness_spec.
std::vector<double> witness_field(const Mesh& mesh, const ValidatedSpec& spec);

struct WitnessResult {
    double closed_form = 0.0;   // quotient from the closed-form norms
    double fem = 0.0;           // quotient of the interpolated witness on the mesh
    double zeta = 0.0;          // discrete supremum on the same mesh (0 when not requested)
    std::size_t nodes = 0;
};
WitnessResult witness_quotient(WitnessKind kind, double eps, double alpha, double xi = 0.0,
                               const DomainMeshOptions& mesh_opts = {}, bool with_zeta = true);

// Bounds G+ and H+ of the curved-passage criterion for passages -g(t) < x1 - z < h(t).
struct CurvedBounds {
    double G = 0.0;
    double H = 0.0;
};
CurvedBounds curved_bounds(const Profile& g, const Profile& h, double eps);
// Supremum over the passages of a spec; Straight passages count as constant profiles.
CurvedBounds curved_bounds(const ValidatedSpec& spec);

}  // namespace sieve

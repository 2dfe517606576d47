#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sieve/capacity.hpp"
#include "sieve/geometry.hpp"
#include "sieve/mesh.hpp"

namespace sieve {

// A function that is smooth on each side of Gamma = {x_n = 0}. `side` is +1 above, -1 below;
// derivatives are optional and needed only for the strip norms.
struct PiecewiseField {
    std::function<double(Vec2, int)> value;
    std::function<Vec2(Vec2, int)> gradient;
    std::function<std::array<double, 3>(Vec2, int)> hessian;   // (xx, xy, yy)
};

// The documented test pair on (-W,W) x (-L,L):
//   g = sign(x_n) (2 + cos(pi x1 / W)) (1 - |x_n| / L)^2,   h = sign(x_n).
struct TestPair {
    PiecewiseField g, h;
};
TestPair kappa_test_pair(double W, double L);

// Norms over O \ Gamma with O = (-W,W) x (-L/2, L/2), by tensor Gauss quadrature of the
// supplied derivatives. order 1 gives the H1 norm, order 2 the H2 norm.
double strip_norm(const PiecewiseField& f, double W, double L, int order);

// Regional means over the half-disks B+_k (upper) and B-_k (lower).
struct GuardMeans {
    std::vector<double> plus, minus;
};
GuardMeans guard_means(const DomainPolygons& cells, const PiecewiseField& f);
// Same for a nodal field on a mesh carrying GuardPlus_k / GuardMinus_k tags.
GuardMeans guard_means(const Mesh& mesh, const std::vector<double>& f, int passages);

// sum_k C_k (<g>_{B+} - <g>_{B-}) (<h>_{B+} - <h>_{B-}). Throws MissingCapacity when a capacity
// is absent or not a finite non-negative number.
double form_lhs(const std::vector<double>& capacities, const GuardMeans& g, const GuardMeans& h);

// int_Gamma mu [g] [h] for analytic fields, Gamma = (-W, W) x {0}.
double form_rhs(const std::function<double(double)>& mu, const PiecewiseField& g, const PiecewiseField& h, double W);
// Edgewise integral on a Gamma-doubled mesh with nodal mu (on the upper trace nodes) and fields.
double form_rhs(const Mesh& hom, const std::vector<double>& mu, const std::vector<double>& g,
                const std::vector<double>& h);
double form_rhs(const Mesh& hom, double mu, const std::vector<double>& g, const std::vector<double>& h);

struct FormComparison {
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0;       // |lhs - rhs|
    double normalizer = 0.0;   // ||g||_H2(O\Gamma) ||h||_H1(O\Gamma)
    double kappa = 0.0;        // defect / normalizer
    double relative_defect() const { return rhs != 0.0 ? defect / std::abs(rhs) : 0.0; }
};

// Cell capacities of every passage; cells with identical geometry share one solve.
std::vector<double> passage_capacities(const ValidatedSpec& spec, const CapacityOptions& opts = {});

// Compares both sides of the interface form for one member of a family with interface strength mu.
FormComparison compare_forms(const ValidatedSpec& spec, double mu, const TestPair& pair,
                             const std::vector<double>& capacities);
FormComparison compare_forms(const ValidatedSpec& spec, double mu, const TestPair& pair,
                             const CapacityOptions& opts = {});

struct KappaRow {
    double eps = 0.0;
    double rho = 0.0;   // period of the family (largest guard diameter otherwise)
    FormComparison form;
};

// One row per spec, computed concurrently and returned in input order.
std::vector<KappaRow> kappa_sweep(const std::vector<ValidatedSpec>& family, double mu, const TestPair& pair,
                                  const CapacityOptions& opts = {});

std::string kappa_csv_header();   // eps,lhs,rhs,defect,kappa
std::string kappa_csv_row(const KappaRow& row);

}  // namespace sieve

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sieve/error.hpp"
#include "sieve/vec2.hpp"

namespace sieve {

class Config;

using Polyline = std::vector<Vec2>;
using Polygon = std::vector<Vec2>;

enum class ShapeKind { Straight, Hourglass, VaryingWidth, BumpedSquare, BumpedRect };
enum class Lateral { Periodic, Neumann };

const char* shape_name(ShapeKind kind);
ShapeKind parse_shape(const std::string& name);

// Piecewise-linear function of x_n given by knots (t, value), t increasing.
struct Profile {
    std::vector<std::pair<double, double>> knots;
    double operator()(double t) const;
    double max_value() const;
    double min_value() const;
    double max_slope() const;
};

// Tent profile: value d at t = +-eps and a at t = 0.
Profile tent_profile(double eps, double d, double a);
Profile constant_profile(double eps, double d);

struct PassageShape {
    ShapeKind kind = ShapeKind::Straight;
    // Straight: half-width. Hourglass: mouth half-width. BumpedRect: half-width of the
    // straight part. BumpedSquare: derived as eps^(3+alpha) when left at zero.
    double d = 0.0;
    double waist = 0.0;   // Hourglass half-width at x_n = 0
    Profile g, h;         // VaryingWidth: -g(x_n) < x1 - z < h(x_n)
    double alpha = 1.0;   // BumpedSquare / BumpedRect exponent
    double xi = 0.0;      // BumpedRect bump scale; zero means eps/2

    static PassageShape straight(double d);
    static PassageShape hourglass(double mouth, double waist);
    static PassageShape varying(Profile g, Profile h);
    static PassageShape bridge(double alpha);
    static PassageShape bump(double d, double alpha, double xi);
};

struct Passage {
    double center = 0.0;   // x'_k (for VaryingWidth this is z_k)
    PassageShape shape;
    double rho = 0.0;      // guard radius rho_{k,eps}
};

struct SieveSpec {
    int n = 2;             // 2, or 3 for the axisymmetric / formula-level mode
    double eps = 0.0;
    double L = 1.0;
    double W = 0.5;
    Lateral lateral = Lateral::Periodic;
    std::vector<Passage> passages;
    // Period of a periodic family (rho_eps in the p/q definitions); zero when absent.
    double period = 0.0;
    int arc_segments = 64;
};

struct Violation {
    ErrorKind kind = ErrorKind::Eps0Violated;
    std::string constraint;
    std::string message;
    int passage = -1;
};

class ValidatedSpec {
public:
    const SieveSpec& spec() const { return spec_; }
    const SieveSpec* operator->() const { return &spec_; }

private:
    friend ValidatedSpec validate_spec(const SieveSpec& spec);
    explicit ValidatedSpec(SieveSpec s) : spec_(std::move(s)) {}
    SieveSpec spec_;
};

// All constraint violations, without throwing.
std::vector<Violation> check_spec(const SieveSpec& spec);
ValidatedSpec validate_spec(const SieveSpec& spec);

// Face radii d^+ and d^- of a passage, and horizontal offsets of the face centers.
double face_radius(const Passage& p, double eps, int side);
double face_offset(const Passage& p, double eps, int side);
Vec2 guard_center(const Passage& p, double eps, int side);

// Boundary description of one passage.
struct PassageOutline {
    Polyline left;    // from the bottom-left mouth corner to the top-left mouth corner
    Polyline right;   // from the bottom-right mouth corner to the top-right mouth corner
    std::vector<std::pair<Vec2, Vec2>> separators;  // interior kink / junction lines
    std::optional<std::pair<Vec2, Vec2>> gamma_chord;  // x_n = 0 chord when the passage is x_n-convex there
    Polygon polygon() const;  // closed CCW polygon of the passage
};

PassageOutline passage_outline(const Passage& p, double eps);
double passage_area(const Passage& p, double eps);

// Polygonal half-disk (side +1: upper, -1: lower); first and last vertices lie on the face.
Polygon half_disk(Vec2 center, double radius, int side, int segments);

enum class CellMarker { SPlus, SMinus, Wall };

struct CellGeometry {
    int index = 0;
    Polygon boundary;                  // CCW polygon of G = int(T u B+ u B-)
    std::vector<CellMarker> edge_marker;  // marker of edge (boundary[i], boundary[i+1])
    Polygon passage;                   // CCW polygon of T
    Polygon guard_plus, guard_minus;   // polygonal half-disks B+ and B-
    double area_T = 0.0, area_Bplus = 0.0, area_Bminus = 0.0;
};

struct PolygonWithHoles {
    Polygon outer;
    std::vector<Polygon> holes;
};

struct DomainPolygons {
    std::vector<CellGeometry> cells;
    std::vector<PolygonWithHoles> omega_eps;   // connected components of Omega_eps
    Polygon omega;                              // (-W,W) x (-L,L)
    std::pair<Vec2, Vec2> gamma;                // the interface segment
    std::vector<Polygon> sieve_pieces;          // wall pieces of Sigma_eps \ passages
};

DomainPolygons build_cells(const ValidatedSpec& spec);

struct PassageScales {
    double gamma_plus = 0.0, gamma_minus = 0.0;
    double eta_plus = 0.0, eta_minus = 0.0;
};

struct ScaleReport {
    std::vector<PassageScales> passages;
    double gamma = 0.0;
    double eta = 0.0;
    double rho = 0.0;      // sup of guard radii
    double chi = 0.0;
    double p = 0.0;
    double q = 0.0;        // may be +inf
    double sqrt_eps = 0.0;
    double zeta = 0.0;
    double kappa = 0.0;
    double sigma = 0.0;
};

double capacity_scale_function(double t, int n);  // G(t): -ln t for n = 2, t^(2-n) otherwise
ScaleReport scale_report(const ValidatedSpec& spec, double zeta, double kappa);

struct FamilyOptions {
    double W = 0.5;
    double L = 1.0;
    Lateral lateral = Lateral::Periodic;
};

// Periodic straight passages solving p_eps = p and q_eps = q exactly.
ValidatedSpec periodic_family(double p, double q, double rho, int n, const FamilyOptions& opts = {});

// Reads a spec from configuration keys under `domain.` and `passages.`
SieveSpec spec_from_config(const Config& cfg);

}  // namespace sieve

#include "sieve/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "sieve/error.hpp"

namespace sieve {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> merge_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Reduced solve with U fixed on `one` (1) and `zero` (0); returns the full nodal field.
std::vector<double> solve_two_level(const CsrMatrix& A, const std::vector<int>& one, const std::vector<int>& zero,
                                    const SolverOptions& solver, double* residual) {
    std::vector<int> fixed;
    std::vector<double> values;
    std::map<int, double> fx;
    for (int i : zero) fx[i] = 0.0;
    for (int i : one) {
        auto it = fx.find(i);
        if (it != fx.end()) fail(ErrorKind::MeshFailure, "a node is held at both 0 and 1");
        fx[i] = 1.0;
    }
    for (auto [i, v] : fx) {
        fixed.push_back(i);
        values.push_back(v);
    }
    DirichletSystem s = constrain_dirichlet(A, fixed, values);
    if (s.free.empty()) {
        if (residual) *residual = 0.0;
        return s.lift;
    }
    CgResult r = cg_solve(s.A, s.rhs_shift, solver);
    if (residual) *residual = r.rel_residual;
    return s.expand(r.x);
}

double symmetry_defect(const Mesh& m, const std::vector<double>& U) {
    std::map<std::pair<double, double>, int> at;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) at.emplace(std::make_pair(m.nodes[i].x, m.nodes[i].y), int(i));
    double worst = 0.0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        auto it = at.find({m.nodes[i].x, -m.nodes[i].y});
        if (it == at.end()) return -1.0;
        worst = std::max(worst, std::abs(U[i] + U[it->second] - 1.0));
    }
    return worst;
}

}  // namespace

CapacityResult solve_capacity(Mesh mesh, const std::vector<int>& one, const std::vector<int>& zero,
                              const SolverOptions& solver) {
    if (one.empty() || zero.empty()) fail(ErrorKind::EmptyMarker, "capacity needs nonempty sets held at 1 and at 0");
    CapacityResult r;
    FemSystem sys = assemble(mesh);
    r.U = solve_two_level(sys.K, merge_unique(one), merge_unique(zero), solver, &r.residual);
    r.value = sys.K.quadratic_form(r.U);
    std::vector<double> KU = sys.K * r.U;
    for (int i : merge_unique(one)) r.flux_value += KU[i];
    auto [lo, hi] = std::minmax_element(r.U.begin(), r.U.end());
    r.min_U = *lo;
    r.max_U = *hi;
    r.mesh = std::move(mesh);
    return r;
}

CapacityResult cell_capacity(Mesh cell_mesh, const SolverOptions& solver) {
    auto plus = cell_mesh.marked_nodes(EdgeKind::SPlus);
    auto minus = cell_mesh.marked_nodes(EdgeKind::SMinus);
    if (plus.empty() || minus.empty()) fail(ErrorKind::EmptyMarker, "cell mesh lacks S+ or S- edges");
    CapacityResult r = solve_capacity(std::move(cell_mesh), plus, minus, solver);
    const Mesh& m = r.mesh;
    auto part = [&](auto pred) {
        AssemblyOptions ao;
        ao.region_filter = pred;
        return assemble(m, ao).K.quadratic_form(r.U);
    };
    r.energy_plus = part([](int t) { return region_kind(t) == RegionKind::GuardPlus; });
    r.energy_minus = part([](int t) { return region_kind(t) == RegionKind::GuardMinus; });
    r.energy_passage = part(is_passage_tag);
    r.symmetry_defect = symmetry_defect(m, r.U);
    return r;
}

CapacityResult cell_capacity(const ValidatedSpec& spec, int k, const CapacityOptions& opts) {
    DomainMeshOptions mo = opts.mesh;
    const auto& p = spec->passages.at(k);
    if (mo.h <= 0.0) mo.h = p.rho * opts.bulk_fraction;
    if (mo.h_neck <= 0.0) mo.h_neck = std::min(mo.h, passage_min_feature(p, spec->eps) * opts.neck_fraction);
    return cell_capacity(mesh_cell(spec, k, mo), opts.solver);
}

double annulus_capacity_exact(double a, double b) {
    if (!(a > 0.0) || !(b > a)) fail(ErrorKind::NonPositiveData, "annulus needs 0 < a < b");
    return 2.0 * kPi / std::log(b / a);
}

CapacityResult annulus_capacity(double a, double b, double h, double h_inner, int segments) {
    annulus_capacity_exact(a, b);
    auto circle = [&](double R) {
        std::vector<Vec2> pts(segments);
        for (int i = 0; i < segments; ++i) {
            double t = 2.0 * kPi * i / segments;
            pts[i] = {R * std::cos(t), R * std::sin(t)};
        }
        return pts;
    };
    Pslg g;
    g.add_polyline(circle(b), edge_marker(EdgeKind::Outer), true);
    g.add_polyline(circle(a), edge_marker(EdgeKind::Dirichlet), true);
    g.holes.push_back({0.0, 0.0});
    g.regions.push_back({{0.5 * (a + b), 0.0}, region_tag(RegionKind::Domain), 0.0});
    MeshParams mp;
    mp.h = h;
    mp.h_neck = h_inner;
    mp.grading = 0.3;
    auto inner = circle(a);
    std::vector<std::pair<Vec2, Vec2>> feats;
    for (int i = 0; i < segments; ++i) feats.push_back({inner[i], inner[(i + 1) % segments]});
    Mesh m = triangulate(g, graded_size(mp, feats), mp);
    auto one = m.marked_nodes(EdgeKind::Dirichlet);
    auto zero = m.marked_nodes(EdgeKind::Outer);
    return solve_capacity(std::move(m), one, zero);
}

double capacity_asym_2d(double p, double q, double rho) {
    if (p < 0.0 || q < 0.0 || rho < 0.0) fail(ErrorKind::NonPositiveData, "p, q and rho must be nonnegative");
    if (p == 0.0 || q == 0.0) return 0.0;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    return kPi * p / (2.0 + kPi * p * inv_q) * rho;
}

// ---------------------------------------------------------------------------
// Axisymmetric problems

namespace {

struct AxisymProblem {
    Pslg pslg;
    std::vector<std::pair<Vec2, Vec2>> features;
    double size = 1.0;   // object size for the near mesh size
};

std::vector<Vec2> arc_points(double R, double t0, double t1, int segs) {
    std::vector<Vec2> pts;
    for (int i = 0; i <= segs; ++i) {
        double t = t0 + (t1 - t0) * i / segs;
        pts.push_back({R * std::cos(t), R * std::sin(t)});
    }
    return pts;
}

// Energy 2 pi (U^T K_r U + U^T B_r U / R) of the minimizer with U = 1 on Dirichlet edges and
// the monopole Robin condition on the outer arc.
double axisym_energy(const AxisymProblem& pb, double R, const AxisymOptions& opts, std::size_t* nodes) {
    MeshParams mp;
    mp.h = opts.h_far_fraction * R;
    mp.h_neck = opts.h_near_fraction * pb.size;
    mp.grading = opts.grading;
    Mesh m = triangulate(pb.pslg, graded_size(mp, pb.features), mp);
    if (nodes) *nodes = m.num_nodes();
    AssemblyOptions ao;
    ao.axisymmetric = true;
    FemSystem sys = assemble(m, ao);
    CsrMatrix B = boundary_mass(m, [](int mk) { return edge_kind(mk) == EdgeKind::Robin; }, true);
    CsrMatrix A = sys.K.combine(1.0, B, 1.0 / R);
    auto one = m.marked_nodes(EdgeKind::Dirichlet);
    if (one.empty()) fail(ErrorKind::EmptyMarker, "axisymmetric problem has no Dirichlet edges");
    std::vector<double> values(one.size(), 1.0);
    DirichletSystem s = constrain_dirichlet(A, one, values);
    SolverOptions so;
    so.rel_tol = 1e-11;
    so.accept_tol = 1e-9;
    std::vector<double> U = s.expand(cg_solve(s.A, s.rhs_shift, so).x);
    return 2.0 * kPi * A.quadratic_form(U);
}

// Quarter of the meridian plane outside the object, bounded by the Robin arc of radius R.
// `object` runs from the axis (0, z0) to the symmetry plane (x1, 0) and carries the
// Dirichlet marker; the plane part beyond x1 is Neumann.
AxisymProblem exterior_problem(const std::vector<Vec2>& object, double R, int arc_segments, double size) {
    AxisymProblem pb;
    pb.size = size;
    Pslg& g = pb.pslg;
    std::vector<int> ids;
    for (const Vec2& p : object) ids.push_back(g.add_point(p));
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        g.add_segment(ids[i], ids[i + 1], edge_marker(EdgeKind::Dirichlet));
        pb.features.push_back({object[i], object[i + 1]});
    }
    auto arc = arc_points(R, 0.0, 0.5 * kPi, arc_segments);
    std::vector<int> aid;
    for (const Vec2& p : arc) aid.push_back(g.add_point(p));
    g.add_segment(ids.back(), aid.front(), edge_marker(EdgeKind::Outer));
    for (std::size_t i = 0; i + 1 < aid.size(); ++i) g.add_segment(aid[i], aid[i + 1], edge_marker(EdgeKind::Robin));
    g.add_segment(aid.back(), ids.front(), edge_marker(EdgeKind::Axis));
    g.regions.push_back({{0.5 * R, 0.3 * R}, region_tag(RegionKind::Domain), 0.0});
    return pb;
}

AxisymProblem newton_problem(NewtonProfile profile, double a, double R, const AxisymOptions& opts) {
    if (profile == NewtonProfile::Disk) {
        AxisymProblem pb = exterior_problem({{0.0, 0.0}, {a, 0.0}}, R, opts.arc_segments, a);
        // Only the rim is singular.
        pb.features = {{{a, 0.0}, {a, 0.0}}};
        return pb;
    }
    auto ball = arc_points(a, 0.5 * kPi, 0.0, std::max(16, opts.arc_segments / 2));
    ball.front() = {0.0, a};
    ball.back() = {a, 0.0};
    return exterior_problem(ball, R, opts.arc_segments, a);
}

void check_axisym_options(const AxisymOptions& opts, double size) {
    if (!(opts.R_inf > 4.0 * size)) fail(ErrorKind::TruncationInvalid, "R_inf must exceed four object sizes");
    if (!(opts.h_near_fraction > 0.0) || !(opts.h_far_fraction > 0.0) || opts.arc_segments < 8)
        fail(ErrorKind::TruncationInvalid, "invalid axisymmetric mesh parameters");
}

}  // namespace

NewtonResult newton_capacity_axisym(NewtonProfile profile, double size, const AxisymOptions& opts) {
    if (!(size > 0.0)) fail(ErrorKind::NonPositiveData, "object size must be positive");
    check_axisym_options(opts, size);
    NewtonResult r;
    // The computed domain is half of space, so the capacity is twice its energy.
    r.cap = 2.0 * axisym_energy(newton_problem(profile, size, opts.R_inf, opts), opts.R_inf, opts, &r.nodes);
    if (opts.check_truncation) {
        const double R2 = 2.0 * opts.R_inf;
        AxisymOptions o2 = opts;
        o2.R_inf = R2;
        r.cap_doubled_radius = 2.0 * axisym_energy(newton_problem(profile, size, R2, o2), R2, o2, nullptr);
        if (std::abs(r.cap_doubled_radius - r.cap) > 0.01 * std::abs(r.cap))
            fail(ErrorKind::TruncationTooSmall, "capacity changes by more than 1% when R_inf is doubled");
    }
    return r;
}

double capacity_disk_well(double p, double q, const AxisymOptions& opts) {
    if (!(p > 0.0) || !(q > 0.0)) fail(ErrorKind::NonPositiveData, "p and q must be positive");
    check_axisym_options(opts, 1.0);
    if (std::isinf(q)) return 0.5 * newton_capacity_axisym(NewtonProfile::Disk, 1.0, opts).cap;
    const double depth = p / q;
    const double R = opts.R_inf;
    AxisymProblem pb;
    pb.size = std::min(1.0, depth);
    Pslg& g = pb.pslg;
    int a0 = g.add_point({0.0, -depth}), a1 = g.add_point({1.0, -depth}), c = g.add_point({1.0, 0.0});
    g.add_segment(a0, a1, edge_marker(EdgeKind::Dirichlet));
    g.add_segment(a1, c, edge_marker(EdgeKind::Wall));
    auto arc = arc_points(R, 0.0, 0.5 * kPi, opts.arc_segments);
    std::vector<int> aid;
    for (const Vec2& pt : arc) aid.push_back(g.add_point(pt));
    g.add_segment(c, aid.front(), edge_marker(EdgeKind::Outer));
    for (std::size_t i = 0; i + 1 < aid.size(); ++i) g.add_segment(aid[i], aid[i + 1], edge_marker(EdgeKind::Robin));
    g.add_segment(aid.back(), a0, edge_marker(EdgeKind::Axis));
    g.regions.push_back({{0.5 * R, 0.3 * R}, region_tag(RegionKind::Domain), 0.0});
    // Re-entrant rim of the well and the rim of the held disk.
    pb.features = {{{1.0, 0.0}, {1.0, 0.0}}, {{1.0, -depth}, {1.0, -depth}}};
    return axisym_energy(pb, R, opts, nullptr);
}

double mu_value(int n, double p, double q, const std::string& cross_section, const AxisymOptions& opts) {
    if (p < 0.0 || q < 0.0) fail(ErrorKind::NonPositiveData, "p and q must be nonnegative");
    if (p == 0.0 || q == 0.0) return 0.0;
    if (n == 2) {
        const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
        return kPi * p / (2.0 + kPi * p * inv_q);
    }
    if (n != 3) fail(ErrorKind::UnsupportedShape, "only n = 2 and n = 3 are supported");
    if (cross_section != "disk") fail(ErrorKind::UnsupportedShape, "n = 3 supports the disk cross-section only");
    if (std::isinf(q)) return 0.25 * p * 8.0;   // cap of the unit disk is 8
    return 0.5 * p * capacity_disk_well(p, q, opts);
}

CapacityBound capacity_bound(double area_T, double eps, double gamma_plus, double gamma_minus, double rho, int n) {
    if (!(eps > 0.0) || area_T < 0.0 || rho < 0.0) fail(ErrorKind::NonPositiveData, "invalid capacity bound data");
    CapacityBound b;
    b.trial_energy = area_T / (4.0 * eps * eps);
    const double r = std::pow(rho, n - 1);
    b.min_expression = std::min({gamma_minus * r, gamma_plus * r, area_T / (eps * eps)});
    return b;
}

std::string capacity_csv_header() {
    return "k,d_plus,d_minus,rho,eps,capacity,flux_capacity,bound,asymptotic,symmetry_defect";
}

std::string capacity_csv_row(int k, double d_plus, double d_minus, double rho, double eps, const CapacityResult& r,
                             double bound, double asymptotic) {
    std::ostringstream os;
    os << std::setprecision(12) << k << ',' << d_plus << ',' << d_minus << ',' << rho << ',' << eps << ',' << r.value
       << ',' << r.flux_value << ',' << bound << ',' << asymptotic << ',' << r.symmetry_defect;
    return os.str();
}

}  // namespace sieve

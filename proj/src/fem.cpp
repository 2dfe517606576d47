#include "sieve/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sieve/clip.hpp"
#include "sieve/error.hpp"

namespace sieve {

Mat3 element_stiffness(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 p[3] = {a, b, c};
    double area2 = cross(b - a, c - a);
    Vec2 g[3];
    for (int i = 0; i < 3; ++i) {
        Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
        g[i] = {-e.y / area2, e.x / area2};
    }
    Mat3 K{};
    double area = 0.5 * area2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) K[i][j] = area * dot(g[i], g[j]);
    return K;
}

Mat3 element_mass(Vec2 a, Vec2 b, Vec2 c) {
    double area = 0.5 * cross(b - a, c - a);
    Mat3 M{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
    return M;
}

namespace {

// int phi_i phi_j (sum_k w_k phi_k) over a triangle of the given area.
Mat3 weighted_mass(double area, const double w[3]) {
    Mat3 M{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                int same = (i == j) + (j == k) + (i == k);
                double c = same == 3 ? 1.0 / 10.0 : (same == 1 ? 1.0 / 30.0 : 1.0 / 60.0);
                s += c * w[k];
            }
            M[i][j] = area * s;
        }
    return M;
}

void check_triangle(Vec2 a, Vec2 b, Vec2 c, std::size_t t) {
    double area = 0.5 * cross(b - a, c - a);
    double w = std::max({a.x, b.x, c.x}) - std::min({a.x, b.x, c.x});
    double h = std::max({a.y, b.y, c.y}) - std::min({a.y, b.y, c.y});
    if (!(area > 1e-14 * w * h))
        fail(ErrorKind::DegenerateTriangle, "triangle " + std::to_string(t) + " is degenerate");
}

bool accepts(const std::function<bool(int)>& pred, int tag) { return !pred || pred(tag); }

}  // namespace

// ---------------------------------------------------------------------------

DofMap DofMap::identity(std::size_t nodes) {
    DofMap d;
    d.node_to_dof.resize(nodes);
    std::iota(d.node_to_dof.begin(), d.node_to_dof.end(), 0);
    d.ndof = static_cast<int>(nodes);
    return d;
}

DofMap DofMap::periodic(const Mesh& mesh) {
    const std::size_t n = mesh.num_nodes();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& pr : mesh.periodic_pairs) {
        int a = find(pr.first), b = find(pr.second);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    DofMap d;
    d.node_to_dof.assign(n, -1);
    std::vector<int> root_dof(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        int r = find(static_cast<int>(i));
        if (root_dof[r] < 0) root_dof[r] = d.ndof++;
        d.node_to_dof[i] = root_dof[r];
    }
    return d;
}

std::vector<double> DofMap::expand(const std::vector<double>& v) const {
    std::vector<double> out(node_to_dof.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[node_to_dof[i]];
    return out;
}

std::vector<double> DofMap::gather(const std::vector<double>& v) const {
    std::vector<double> out(ndof, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) out[node_to_dof[i]] += v[i];
    return out;
}

std::vector<double> DofMap::pick(const std::vector<double>& v) const {
    std::vector<double> out(ndof, 0.0);
    for (std::size_t i = v.size(); i-- > 0;) out[node_to_dof[i]] = v[i];
    return out;
}

CsrMatrix DofMap::condense(const CsrMatrix& A) const {
    if (trivial()) return A;
    return A.aggregate(node_to_dof, ndof);
}

// ---------------------------------------------------------------------------

FemSystem assemble(const Mesh& mesh, const AssemblyOptions& opts) {
    const int n = static_cast<int>(mesh.num_nodes());
    std::vector<Triplet> tk, tm;
    tk.reserve(9 * mesh.num_tris());
    tm.reserve(9 * mesh.num_tris());
    for (std::size_t t = 0; t < mesh.num_tris(); ++t) {
        const auto& T = mesh.tris[t];
        Vec2 a = mesh.nodes[T[0]], b = mesh.nodes[T[1]], c = mesh.nodes[T[2]];
        check_triangle(a, b, c, t);
        if (!accepts(opts.region_filter, mesh.region[t])) continue;
        Mat3 K = element_stiffness(a, b, c);
        Mat3 M;
        if (opts.axisymmetric) {
            double rbar = (a.x + b.x + c.x) / 3.0;
            for (auto& row : K)
                for (double& v : row) v *= rbar;
            const double w[3] = {a.x, b.x, c.x};
            M = weighted_mass(0.5 * cross(b - a, c - a), w);
        } else {
            M = element_mass(a, b, c);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                tk.push_back({T[i], T[j], K[i][j]});
                tm.push_back({T[i], T[j], M[i][j]});
            }
    }
    FemSystem sys;
    sys.mesh = &mesh;
    sys.K = CsrMatrix::from_triplets(n, n, std::move(tk));
    sys.M = CsrMatrix::from_triplets(n, n, std::move(tm));
    return sys;
}

CsrMatrix assemble_mass(const Mesh& mesh, const std::function<bool(int)>& region_filter) {
    AssemblyOptions o;
    o.region_filter = region_filter;
    return assemble(mesh, o).M;
}

CsrMatrix interface_coupling(const Mesh& mesh, const std::vector<double>& mu) {
    const int n = static_cast<int>(mesh.num_nodes());
    if (mu.size() != mesh.num_nodes()) fail(ErrorKind::MeshMismatch, "mu must be sampled at every mesh node");
    std::map<int, int> lower;
    for (const auto& p : mesh.gamma_pairs) lower[p.first] = p.second;
    std::vector<Triplet> t;
    for (const auto& e : mesh.edges) {
        if (edge_kind(e.marker) != EdgeKind::Gamma) continue;
        auto ia = lower.find(e.a), ib = lower.find(e.b);
        if (ia == lower.end() || ib == lower.end()) fail(ErrorKind::MissingPair, "interface node without a lower partner");
        double len = dist(mesh.nodes[e.a], mesh.nodes[e.b]);
        double ma = mu[e.a], mb = mu[e.b];
        if (ma < 0.0 || mb < 0.0) fail(ErrorKind::ConfigError, "mu must be non-negative");
        double q[2][2] = {{len * (ma / 4.0 + mb / 12.0), len * (ma + mb) / 12.0},
                          {len * (ma + mb) / 12.0, len * (ma / 12.0 + mb / 4.0)}};
        // Jump j_a = u(a) - u(a'), j_b = u(b) - u(b').
        const int up[2] = {e.a, e.b}, lo[2] = {ia->second, ib->second};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                t.push_back({up[i], up[j], q[i][j]});
                t.push_back({lo[i], lo[j], q[i][j]});
                t.push_back({up[i], lo[j], -q[i][j]});
                t.push_back({lo[i], up[j], -q[i][j]});
            }
    }
    return CsrMatrix::from_triplets(n, n, std::move(t));
}

CsrMatrix interface_coupling(const Mesh& mesh, double mu) {
    return interface_coupling(mesh, std::vector<double>(mesh.num_nodes(), mu));
}

CsrMatrix boundary_mass(const Mesh& mesh, const std::function<bool(int)>& marker_pred, bool axisymmetric) {
    const int n = static_cast<int>(mesh.num_nodes());
    std::vector<Triplet> t;
    for (const auto& e : mesh.edges) {
        if (!marker_pred(e.marker)) continue;
        Vec2 a = mesh.nodes[e.a], b = mesh.nodes[e.b];
        double len = dist(a, b);
        double m[2][2];
        if (axisymmetric) {
            // int phi_i phi_j (r_a phi_a + r_b phi_b) ds
            m[0][0] = len * (a.x / 4.0 + b.x / 12.0);
            m[1][1] = len * (a.x / 12.0 + b.x / 4.0);
            m[0][1] = m[1][0] = len * (a.x + b.x) / 12.0;
        } else {
            m[0][0] = m[1][1] = len / 3.0;
            m[0][1] = m[1][0] = len / 6.0;
        }
        const int v[2] = {e.a, e.b};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) t.push_back({v[i], v[j], m[i][j]});
    }
    return CsrMatrix::from_triplets(n, n, std::move(t));
}

// ---------------------------------------------------------------------------

std::vector<double> DirichletSystem::expand(const std::vector<double>& fv) const {
    std::vector<double> u = lift;
    for (std::size_t i = 0; i < free.size(); ++i) u[free[i]] = fv[i];
    return u;
}

DirichletSystem constrain_dirichlet(const CsrMatrix& A, const std::vector<int>& fixed_in, const std::vector<double>& values) {
    if (fixed_in.empty()) fail(ErrorKind::EmptyMarker, "Dirichlet marker selects no nodes");
    if (values.size() != fixed_in.size()) fail(ErrorKind::MeshMismatch, "one Dirichlet value per fixed index required");
    const int n = A.rows();
    DirichletSystem s;
    s.lift.assign(n, 0.0);
    std::vector<char> is_fixed(n, 0);
    for (std::size_t i = 0; i < fixed_in.size(); ++i) {
        is_fixed[fixed_in[i]] = 1;
        s.lift[fixed_in[i]] = values[i];
    }
    for (int i = 0; i < n; ++i) (is_fixed[i] ? s.fixed : s.free).push_back(i);
    s.A = A.principal(s.free);
    std::vector<double> Al = A * s.lift;
    s.rhs_shift.resize(s.free.size());
    for (std::size_t i = 0; i < s.free.size(); ++i) s.rhs_shift[i] = -Al[s.free[i]];
    return s;
}

std::vector<double> solve_dirichlet(const CsrMatrix& A, const std::vector<double>& b, const std::vector<int>& fixed,
                                    const std::vector<double>& values, const SolverOptions& opts) {
    DirichletSystem s = constrain_dirichlet(A, fixed, values);
    if (s.free.empty()) return s.lift;
    std::vector<double> rhs(s.free.size());
    for (std::size_t i = 0; i < s.free.size(); ++i) rhs[i] = b[s.free[i]] + s.rhs_shift[i];
    return s.expand(cg_solve(s.A, rhs, opts).x);
}

Norms norms(const FemSystem& sys, const std::vector<double>& f, const CsrMatrix* coupling) {
    if (f.size() != sys.num_nodes()) fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    Norms r;
    r.l2 = std::sqrt(std::max(0.0, sys.M.quadratic_form(f)));
    r.h1_semi = std::sqrt(std::max(0.0, sys.K.quadratic_form(f)));
    r.h1 = std::hypot(r.l2, r.h1_semi);
    if (coupling) r.jump = std::sqrt(std::max(0.0, coupling->quadratic_form(f)));
    return r;
}

double integrate_field(const Mesh& mesh, const std::vector<double>& f, const std::function<bool(int)>& pred) {
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_tris(); ++t) {
        if (!accepts(pred, mesh.region[t])) continue;
        const auto& T = mesh.tris[t];
        s += mesh.triangle_area(t) * (f[T[0]] + f[T[1]] + f[T[2]]) / 3.0;
    }
    return s;
}

double mean_over_region(const Mesh& mesh, const std::vector<double>& f, const std::function<bool(int)>& pred) {
    if (f.size() != mesh.num_nodes()) fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    double area = mesh.region_area(pred);
    if (!(area > 0.0)) fail(ErrorKind::EmptyRegion, "region has zero area");
    return integrate_field(mesh, f, pred) / area;
}

double mean_over_region(const Mesh& mesh, const std::vector<double>& f, int tag) {
    return mean_over_region(mesh, f, [tag](int r) { return r == tag; });
}

PolygonIntegral integrate_over_polygon(const PointLocator& loc, const std::vector<double>& f, const Polygon& convex,
                                       const std::function<bool(int)>& pred) {
    const Mesh& mesh = loc.mesh();
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto& p : convex) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    std::vector<int> cand;
    loc.candidates(lo, hi, cand);
    PolygonIntegral r;
    for (int t : cand) {
        if (!accepts(pred, mesh.region[t])) continue;
        const auto& T = mesh.tris[t];
        Polygon tri{mesh.nodes[T[0]], mesh.nodes[T[1]], mesh.nodes[T[2]]};
        Polygon piece = clip_convex(tri, convex);
        if (piece.empty()) continue;
        Affine a = affine_from_triangle(tri[0], tri[1], tri[2], f[T[0]], f[T[1]], f[T[2]]);
        r.integral += integrate_affine(piece, a);
        r.area += polygon_signed_area(piece);
    }
    return r;
}

std::vector<double> load_vector(const Mesh& mesh, const RegionFunction& f, const AssemblyOptions& opts) {
    std::vector<double> b(mesh.num_nodes(), 0.0);
    const auto& rule = triangle_rule();
    for (std::size_t t = 0; t < mesh.num_tris(); ++t) {
        if (!accepts(opts.region_filter, mesh.region[t])) continue;
        const auto& T = mesh.tris[t];
        Vec2 a = mesh.nodes[T[0]], bb = mesh.nodes[T[1]], c = mesh.nodes[T[2]];
        double area = mesh.triangle_area(t);
        for (const auto& q : rule) {
            Vec2 p = q.l1 * a + q.l2 * bb + q.l3 * c;
            double w = q.weight * area * f(p, mesh.region[t]);
            if (opts.axisymmetric) w *= p.x;
            b[T[0]] += w * q.l1;
            b[T[1]] += w * q.l2;
            b[T[2]] += w * q.l3;
        }
    }
    return b;
}

std::vector<double> interpolate(const Mesh& mesh, const std::function<double(Vec2)>& f) {
    std::vector<double> v(mesh.num_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh.nodes[i]);
    return v;
}

BrokenField broken_from_nodal(const Mesh& mesh, const std::vector<double>& f) {
    BrokenField b;
    b.corner.resize(mesh.num_tris());
    for (std::size_t t = 0; t < mesh.num_tris(); ++t)
        for (int i = 0; i < 3; ++i) b.corner[t][i] = f[mesh.tris[t][i]];
    return b;
}

double broken_l2_sq(const Mesh& mesh, const BrokenField& f, const std::function<bool(int)>& pred) {
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_tris(); ++t) {
        if (!accepts(pred, mesh.region[t])) continue;
        const auto& v = f.corner[t];
        double q = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[0] * v[1] + v[1] * v[2] + v[0] * v[2];
        s += mesh.triangle_area(t) * q / 6.0;
    }
    return s;
}

double broken_h1_semi_sq(const Mesh& mesh, const BrokenField& f, const std::function<bool(int)>& pred) {
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_tris(); ++t) {
        if (!accepts(pred, mesh.region[t])) continue;
        const auto& T = mesh.tris[t];
        Affine a = affine_from_triangle(mesh.nodes[T[0]], mesh.nodes[T[1]], mesh.nodes[T[2]], f.corner[t][0],
                                        f.corner[t][1], f.corner[t][2]);
        s += mesh.triangle_area(t) * dot(a.g, a.g);
    }
    return s;
}

}  // namespace sieve

#include "sieve/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "sieve/clip.hpp"
#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/capacity.hpp"

namespace sieve {

namespace {

constexpr double kPi = std::numbers::pi;

Polygon triangle_polygon(const Mesh& m, std::size_t t) {
    const auto& T = m.tris[t];
    return {m.nodes[T[0]], m.nodes[T[1]], m.nodes[T[2]]};
}

Affine nodal_affine(const Mesh& m, std::size_t t, const std::vector<double>& f) {
    const auto& T = m.tris[t];
    return affine_from_triangle(m.nodes[T[0]], m.nodes[T[1]], m.nodes[T[2]], f[T[0]], f[T[1]], f[T[2]]);
}

Affine corner_affine(const Mesh& m, std::size_t t, const BrokenField& f) {
    const auto& T = m.tris[t];
    const auto& c = f.corner[t];
    return affine_from_triangle(m.nodes[T[0]], m.nodes[T[1]], m.nodes[T[2]], c[0], c[1], c[2]);
}

Polygon ccw(Polygon p) {
    if (polygon_signed_area(p) < 0.0) std::reverse(p.begin(), p.end());
    return p;
}

void bounding_box(const Polygon& p, Vec2& lo, Vec2& hi) {
    lo = hi = p.front();
    for (const Vec2& v : p) {
        lo.x = std::min(lo.x, v.x), lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x), hi.y = std::max(hi.y, v.y);
    }
}

long long edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

// Gradient of the P1 interpolant on triangle t.
Vec2 gradient(const Mesh& m, std::size_t t, const std::vector<double>& f) { return nodal_affine(m, t, f).g; }

std::vector<double> solve_condensed(const Mesh& mesh, const CsrMatrix& A, const std::vector<double>& load,
                                    const SolverOptions& opts, double& residual, int& iterations) {
    DofMap dm = mesh.periodic_pairs.empty() ? DofMap::identity(mesh.num_nodes()) : DofMap::periodic(mesh);
    CsrMatrix Ad = dm.trivial() ? A : dm.condense(A);
    std::vector<double> b = dm.trivial() ? load : dm.gather(load);
    CgResult r = cg_solve(Ad, b, opts);
    residual = r.rel_residual;
    iterations = r.iterations;
    return dm.trivial() ? r.x : dm.expand(r.x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sources

double Source::operator()(Vec2 x) const {
    switch (kind) {
    case SourceKind::Zero: return 0.0;
    case SourceKind::Constant: return value;
    case SourceKind::Upper: return x.y > 0.0 ? value : 0.0;
    case SourceKind::Sign: return x.y > 0.0 ? value : (x.y < 0.0 ? -value : 0.0);
    case SourceKind::Trig: return value * (std::cos(kPi * x.x / W) + std::sin(kPi * x.y / (2.0 * L)));
    }
    return 0.0;
}

double Source::l2_norm() const {
    const double area = 4.0 * W * L;
    switch (kind) {
    case SourceKind::Zero: return 0.0;
    case SourceKind::Constant:
    case SourceKind::Sign:
    case SourceKind::Trig: return std::abs(value) * std::sqrt(area);
    case SourceKind::Upper: return std::abs(value) * std::sqrt(0.5 * area);
    }
    return 0.0;
}

std::string Source::name() const {
    switch (kind) {
    case SourceKind::Zero: return "zero";
    case SourceKind::Constant: return "constant";
    case SourceKind::Upper: return "upper";
    case SourceKind::Sign: return "sign";
    case SourceKind::Trig: return "trig";
    }
    return "?";
}

RegionFunction Source::as_region_function() const {
    Source s = *this;
    return [s](Vec2 x, int) { return s(x); };
}

Source make_source(const std::string& name, double W, double L, double value) {
    Source s;
    s.W = W;
    s.L = L;
    s.value = value;
    if (name == "zero") s.kind = SourceKind::Zero;
    else if (name == "constant") s.kind = SourceKind::Constant;
    else if (name == "upper") s.kind = SourceKind::Upper;
    else if (name == "sign") s.kind = SourceKind::Sign;
    else if (name == "trig") s.kind = SourceKind::Trig;
    else fail(ErrorKind::ConfigError, "unknown source '" + name + "' (zero, constant, upper, sign, trig)");
    return s;
}

// ---------------------------------------------------------------------------
// Solves

PerforatedSolution solve_perforated(const Mesh& mesh, const RegionFunction& f, const SolverOptions& opts) {
    FemSystem sys = assemble(mesh);
    CsrMatrix A = sys.K.combine(1.0, sys.M, 1.0);
    PerforatedSolution s;
    s.u = solve_condensed(mesh, A, load_vector(mesh, f), opts, s.residual, s.iterations);
    return s;
}

std::vector<double> load_vector_excluding(const Mesh& mesh, const RegionFunction& f,
                                          const std::vector<Polygon>& excluded) {
    std::vector<double> b = load_vector(mesh, f);
    if (excluded.empty()) return b;
    PointLocator loc(mesh);
    std::vector<int> cand;
    for (const Polygon& raw : excluded) {
        Polygon poly = ccw(raw);
        Vec2 lo, hi;
        bounding_box(poly, lo, hi);
        loc.candidates(lo, hi, cand);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (int t : cand) {
            Polygon piece = clip_convex(triangle_polygon(mesh, t), poly);
            if (piece.size() < 3) continue;
            const auto& T = mesh.tris[t];
            const int tag = mesh.region[t];
            for (int c = 0; c < 3; ++c) {
                // Hat function of corner c restricted to this triangle.
                double v[3] = {0.0, 0.0, 0.0};
                v[c] = 1.0;
                Affine phi = affine_from_triangle(mesh.nodes[T[0]], mesh.nodes[T[1]], mesh.nodes[T[2]], v[0], v[1], v[2]);
                b[T[c]] -= integrate_function(piece, [&](Vec2 p) { return f(p, tag) * phi(p); });
            }
        }
    }
    return b;
}

HomogenizedSolution solve_homogenized(const Mesh& mesh, double mu, const RegionFunction& f,
                                      const HomogenizedOptions& opts) {
    if (mu < 0.0) fail(ErrorKind::NonPositiveData, "mu must be non-negative");
    FemSystem sys = assemble(mesh);
    CsrMatrix A = sys.K.combine(1.0, sys.M, 1.0);
    if (mu > 0.0) A = A.combine(1.0, interface_coupling(mesh, mu), 1.0);
    HomogenizedSolution s;
    s.mu = mu;
    s.u = solve_condensed(mesh, A, load_vector_excluding(mesh, f, opts.zero_regions), opts.solver, s.residual,
                          s.iterations);

    for (const auto& [a, b] : mesh.gamma_pairs) s.jump.push_back({mesh.nodes[a].x, s.u[a] - s.u[b]});
    std::sort(s.jump.begin(), s.jump.end(), [](const JumpSample& p, const JumpSample& q) { return p.x < q.x; });

    // Flux recovery from the triangles adjacent to Gamma on either side.
    std::unordered_map<long long, std::vector<int>> tris_of_edge;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t)
        for (int k = 0; k < 3; ++k)
            tris_of_edge[edge_key(mesh.tris[t][k], mesh.tris[t][(k + 1) % 3])].push_back(static_cast<int>(t));
    std::unordered_map<int, int> lower_of;
    for (const auto& [a, b] : mesh.gamma_pairs) lower_of[a] = b;
    double num_p = 0.0, num_m = 0.0, den = 0.0;
    auto seg = [](double ca, double cb, double ell) { return ell * (ca * ca + ca * cb + cb * cb) / 3.0; };
    for (const MeshEdge& e : mesh.edges_of(EdgeKind::Gamma)) {
        auto la = lower_of.find(e.a), lb = lower_of.find(e.b);
        if (la == lower_of.end() || lb == lower_of.end()) fail(ErrorKind::MissingPair, "Gamma edge without lower partner");
        int tu = -1, tl = -1;
        for (int t : tris_of_edge[edge_key(e.a, e.b)])
            if (is_upper_tag(mesh.region[t])) tu = t;
        for (int t : tris_of_edge[edge_key(la->second, lb->second)])
            if (is_lower_tag(mesh.region[t])) tl = t;
        if (tu < 0 || tl < 0) fail(ErrorKind::MeshFailure, "Gamma edge without adjacent triangles");
        const double ell = dist(mesh.nodes[e.a], mesh.nodes[e.b]);
        const double ja = mu * (s.u[e.a] - s.u[la->second]), jb = mu * (s.u[e.b] - s.u[lb->second]);
        const double gp = gradient(mesh, tu, s.u).y, gm = gradient(mesh, tl, s.u).y;
        num_p += seg(gp - ja, gp - jb, ell);
        num_m += seg(gm - ja, gm - jb, ell);
        den += seg(ja, jb, ell);
    }
    auto rel = [&](double num) { return den > 1e-300 ? std::sqrt(num / den) : std::sqrt(num); };
    s.flux_defect_plus = rel(num_p);
    s.flux_defect_minus = rel(num_m);
    return s;
}

// ---------------------------------------------------------------------------
// Transfers

double evaluate_homogenized(const PointLocator& locator, const std::vector<double>& u, Vec2 p, int side) {
    if (side == 0 && p.y == 0.0) fail(ErrorKind::PointOnInterface, "evaluation on Gamma needs a side");
    const Mesh& m = locator.mesh();
    const bool upper = side > 0 || (side == 0 && p.y > 0.0);
    int t = locator.locate(p, [&](int tt) { return is_upper_tag(m.region[tt]) == upper; });
    if (t < 0) fail(ErrorKind::GridMismatch, "point outside the homogenized mesh");
    auto l = barycentric(m, t, p);
    const auto& T = m.tris[t];
    return l[0] * u[T[0]] + l[1] * u[T[1]] + l[2] * u[T[2]];
}

BrokenField restrict_to_perforated(const Mesh& hom, const std::vector<double>& u, const Mesh& perforated) {
    if (u.size() != hom.num_nodes()) fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    PointLocator loc(hom);
    BrokenField out;
    out.corner.resize(perforated.num_tris());
    for (std::size_t t = 0; t < perforated.num_tris(); ++t) {
        const int side = is_upper_tag(perforated.region[t]) ? 1 : -1;
        for (int c = 0; c < 3; ++c)
            out.corner[t][c] = evaluate_homogenized(loc, u, perforated.nodes[perforated.tris[t][c]], side);
    }
    return out;
}

std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine, const std::vector<double>& u) {
    if (u.size() != coarse.num_nodes()) fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    PointLocator loc(coarse);
    std::vector<double> out(fine.num_nodes(), 0.0);
    std::vector<char> done(fine.num_nodes(), 0);
    for (std::size_t i = 0; i < coarse.num_nodes() && i < fine.num_nodes(); ++i)
        if (coarse.nodes[i].x == fine.nodes[i].x && coarse.nodes[i].y == fine.nodes[i].y) out[i] = u[i], done[i] = 1;
    for (std::size_t t = 0; t < fine.num_tris(); ++t) {
        const bool upper = is_upper_tag(fine.region[t]);
        for (int c = 0; c < 3; ++c) {
            const int v = fine.tris[t][c];
            if (done[v]) continue;
            Vec2 p = fine.nodes[v];
            int tc = loc.locate(p, [&](int tt) { return is_upper_tag(coarse.region[tt]) == upper; });
            if (tc < 0) fail(ErrorKind::GridMismatch, "fine node outside the coarse mesh");
            auto l = barycentric(coarse, tc, p);
            const auto& T = coarse.tris[tc];
            out[v] = l[0] * u[T[0]] + l[1] * u[T[1]] + l[2] * u[T[2]];
            done[v] = 1;
        }
    }
    return out;
}

Supermesh::Supermesh(const Mesh& perforated, const Mesh& hom) : perf_(&perforated), hom_(&hom) {
    PointLocator loc(hom);
    std::vector<int> cand;
    double total = 0.0;
    for (std::size_t t = 0; t < perforated.num_tris(); ++t) {
        Polygon tri = triangle_polygon(perforated, t);
        total += polygon_signed_area(tri);
        Vec2 lo, hi;
        bounding_box(tri, lo, hi);
        loc.candidates(lo, hi, cand);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        const bool upper = is_upper_tag(perforated.region[t]);
        for (int th : cand) {
            if (is_upper_tag(hom.region[th]) != upper) continue;
            Polygon piece = clip_convex(triangle_polygon(hom, th), tri);
            if (piece.size() < 3) continue;
            double a = polygon_signed_area(piece);
            if (a <= 0.0) continue;
            pairs_.push_back({static_cast<int>(t), th});
            covered_ += a;
        }
    }
    if (std::abs(covered_ - total) > 1e-9 * std::max(total, 1e-300))
        fail(ErrorKind::GridMismatch, "homogenized mesh does not cover the perforated mesh");
}

Supermesh::Difference Supermesh::difference(const std::vector<double>& a, const BrokenField* k,
                                            const std::vector<double>& b,
                                            const std::function<bool(int)>& region) const {
    const Mesh& P = *perf_;
    const Mesh& H = *hom_;
    if (!a.empty() && a.size() != P.num_nodes()) fail(ErrorKind::MeshMismatch, "perforated field length mismatch");
    if (!b.empty() && b.size() != H.num_nodes()) fail(ErrorKind::MeshMismatch, "homogenized field length mismatch");
    if (k && k->corner.size() != P.num_tris()) fail(ErrorKind::MeshMismatch, "broken field size mismatch");
    Difference d;
    for (const auto& [tp, th] : pairs_) {
        if (region && !region(P.region[tp])) continue;
        Polygon piece = clip_convex(triangle_polygon(H, th), triangle_polygon(P, tp));
        if (piece.size() < 3) continue;
        Affine f;
        f.origin = piece.front();
        f.c = 0.0;
        f.g = {0.0, 0.0};
        if (!a.empty()) {
            Affine fa = nodal_affine(P, tp, a);
            f.c += fa(f.origin), f.g = f.g + fa.g;
        }
        if (k) {
            Affine fk = corner_affine(P, tp, *k);
            f.c += fk(f.origin), f.g = f.g + fk.g;
        }
        if (!b.empty()) {
            Affine fb = nodal_affine(H, th, b);
            f.c -= fb(f.origin), f.g = f.g - fb.g;
        }
        d.l2_sq += integrate_affine_product(piece, f, f);
        d.h1_semi_sq += dot(f.g, f.g) * polygon_signed_area(piece);
    }
    return d;
}

std::vector<double> Supermesh::integrals_by_region(const std::vector<double>& b, const std::function<int(int)>& bin_of,
                                                   int bins) const {
    const Mesh& P = *perf_;
    const Mesh& H = *hom_;
    if (b.size() != H.num_nodes()) fail(ErrorKind::MeshMismatch, "homogenized field length mismatch");
    std::vector<double> out(bins, 0.0);
    for (const auto& [tp, th] : pairs_) {
        int bin = bin_of(P.region[tp]);
        if (bin < 0 || bin >= bins) continue;
        Polygon piece = clip_convex(triangle_polygon(H, th), triangle_polygon(P, tp));
        if (piece.size() < 3) continue;
        out[bin] += integrate_affine(piece, nodal_affine(H, th, b));
    }
    return out;
}

double l2_sq_over_polygons(const Mesh& hom, const std::vector<double>& b, const std::vector<Polygon>& polygons) {
    if (b.size() != hom.num_nodes()) fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    PointLocator loc(hom);
    std::vector<int> cand;
    double s = 0.0;
    for (const Polygon& raw : polygons) {
        Polygon poly = ccw(raw);
        Vec2 lo, hi;
        bounding_box(poly, lo, hi);
        loc.candidates(lo, hi, cand);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (int t : cand) {
            Polygon piece = clip_convex(triangle_polygon(hom, t), poly);
            if (piece.size() < 3) continue;
            Affine f = nodal_affine(hom, t, b);
            s += integrate_affine_product(piece, f, f);
        }
    }
    return s;
}

ZeroExtension extend_by_zero(const Supermesh& overlay, const std::vector<double>& u) {
    ZeroExtension z;
    z.l2 = std::sqrt(std::max(0.0, overlay.difference(u, nullptr, {}).l2_sq));
    CsrMatrix M = assemble_mass(overlay.perforated(), {});
    z.perforated_l2 = std::sqrt(std::max(0.0, M.quadratic_form(u)));
    return z;
}

// ---------------------------------------------------------------------------
// Correctors

namespace {
bool in_cell(int tag, int k) {
    auto kind = region_kind(tag);
    return tag_index(tag) == k && (kind == RegionKind::GuardPlus || kind == RegionKind::GuardMinus ||
                                   kind == RegionKind::PassageUpper || kind == RegionKind::PassageLower);
}
}  // namespace

CellPotentials cell_potentials(const Mesh& perforated, int passages, const SolverOptions& opts) {
    CellPotentials cp;
    cp.U.assign(perforated.num_nodes(), 0.0);
    for (int k = 0; k < passages; ++k) {
        SubMesh sub = extract_submesh(perforated, [k](int tag) { return in_cell(tag, k); });
        if (sub.mesh.tris.empty()) fail(ErrorKind::EmptyRegion, "cell " + std::to_string(k) + " has no triangles");
        auto one = sub.mesh.marked_nodes(edge_marker(EdgeKind::SPlus, k));
        auto zero = sub.mesh.marked_nodes(edge_marker(EdgeKind::SMinus, k));
        CapacityResult r = solve_capacity(std::move(sub.mesh), one, zero, opts);
        for (std::size_t i = 0; i < r.U.size(); ++i) cp.U[sub.node_to_parent[i]] = r.U[i];
        cp.capacity.push_back(r.value);
    }
    return cp;
}

Correctors build_correctors(const Supermesh& overlay, const CellPotentials& cells, const std::vector<double>& g) {
    const Mesh& P = overlay.perforated();
    const int K = static_cast<int>(cells.capacity.size());
    if (cells.U.size() != P.num_nodes() || K == 0)
        fail(ErrorKind::MissingPotential, "cell potentials do not match the perforated mesh");
    auto bin_of = [K](int tag) {
        auto kind = region_kind(tag);
        int k = tag_index(tag);
        if (k >= K) return -1;
        if (kind == RegionKind::GuardPlus) return k;
        if (kind == RegionKind::GuardMinus) return K + k;
        return -1;
    };
    std::vector<double> integ = overlay.integrals_by_region(g, bin_of, 2 * K);
    std::vector<double> area(2 * K, 0.0);
    for (std::size_t t = 0; t < P.num_tris(); ++t) {
        int bin = bin_of(P.region[t]);
        if (bin >= 0) area[bin] += P.triangle_area(t);
    }
    Correctors c;
    c.capacity = cells.capacity;
    for (int k = 0; k < K; ++k) {
        if (area[k] <= 0.0 || area[K + k] <= 0.0) fail(ErrorKind::EmptyRegion, "guard region without triangles");
        c.mean_plus.push_back(integ[k] / area[k]);
        c.mean_minus.push_back(integ[K + k] / area[K + k]);
        const double delta = c.mean_minus[k] - c.mean_plus[k];
        c.energy_sum += cells.capacity[k] * delta * delta;
    }
    c.plus.corner.assign(P.num_tris(), {0.0, 0.0, 0.0});
    c.minus.corner.assign(P.num_tris(), {0.0, 0.0, 0.0});
    c.passage.corner.assign(P.num_tris(), {0.0, 0.0, 0.0});
    for (std::size_t t = 0; t < P.num_tris(); ++t) {
        const int tag = P.region[t];
        const int k = tag_index(tag);
        if (k >= K) continue;
        const auto kind = region_kind(tag);
        const double mp = c.mean_plus[k], mm = c.mean_minus[k];
        for (int j = 0; j < 3; ++j) {
            const double U = cells.U[P.tris[t][j]];
            if (kind == RegionKind::GuardPlus) c.plus.corner[t][j] = (mm - mp) * (1.0 - U);
            else if (kind == RegionKind::GuardMinus) c.minus.corner[t][j] = (mp - mm) * U;
            else if (kind == RegionKind::PassageUpper || kind == RegionKind::PassageLower)
                c.passage.corner[t][j] = mp * U + mm * (1.0 - U);
        }
    }
    c.energy_plus = broken_h1_semi_sq(P, c.plus);
    c.energy_minus = broken_h1_semi_sq(P, c.minus);
    c.energy_passage = broken_h1_semi_sq(P, c.passage, is_passage_tag);
    return c;
}

}  // namespace sieve

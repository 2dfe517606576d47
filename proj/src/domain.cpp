#include "sieve/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sieve/error.hpp"

namespace sieve {

namespace {

struct SegSpec {
    Vec2 a, b;
    int marker;
};

class PslgBuilder {
public:
    explicit PslgBuilder(double tol) : tol_(tol) {}
    // Points closer than the tolerance (rounding noise between touching guards) are merged.
    int point(Vec2 p) {
        auto it = ids_.lower_bound({p.x - tol_, -1e300});
        for (; it != ids_.end() && it->first.first <= p.x + tol_; ++it)
            if (std::abs(it->first.second - p.y) <= tol_) return it->second;
        int id = pslg.add_point(p);
        ids_.emplace(std::make_pair(p.x, p.y), id);
        return id;
    }
    int segment(Vec2 a, Vec2 b, int marker) {
        int ia = point(a), ib = point(b);
        if (ia == ib) return -1;
        return pslg.add_segment(ia, ib, marker);
    }
    Pslg pslg;

private:
    double tol_;
    std::map<std::pair<double, double>, int> ids_;
};

bool point_in_polygon(Vec2 p, const Polygon& poly) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

// Segments of the passage complex (faces, mouths, walls, separators, arcs, chords).
struct Complex {
    std::vector<SegSpec> segs;
    std::vector<Vec2> holes;
    std::vector<Pslg::Region> regions;
};

Complex build_complex(const SieveSpec& spec, const std::vector<int>& which, bool with_outer) {
    Complex cx;
    const double eps = spec.eps, W = spec.W, L = spec.L;
    std::vector<PassageOutline> outlines;
    for (int k : which) outlines.push_back(passage_outline(spec.passages[k], eps));

    for (int side : {+1, -1}) {
        const double y = side * eps;
        const int splus = side > 0 ? static_cast<int>(EdgeKind::SPlus) : static_cast<int>(EdgeKind::SMinus);
        struct Mouth {
            double lo, hi;
            int k;
        };
        std::vector<Mouth> mouths;
        std::vector<double> breaks;
        for (std::size_t j = 0; j < which.size(); ++j) {
            int k = which[j];
            const auto& p = spec.passages[k];
            const auto& o = outlines[j];
            double ml = side > 0 ? o.left.back().x : o.left.front().x;
            double mr = side > 0 ? o.right.back().x : o.right.front().x;
            mouths.push_back({ml, mr, k});
            Vec2 gc = guard_center(p, eps, side);
            Polygon arc = half_disk(gc, p.rho, side, spec.arc_segments);
            for (std::size_t i = 0; i + 1 < arc.size(); ++i)
                cx.segs.push_back({arc[i], arc[i + 1], splus * kTagBase + k});
            breaks.push_back(ml);
            breaks.push_back(mr);
            breaks.push_back(gc.x - p.rho);
            breaks.push_back(gc.x + p.rho);
            if (!with_outer) {
                cx.segs.push_back({{gc.x - p.rho, y}, {ml, y}, edge_marker(EdgeKind::Wall, k)});
                cx.segs.push_back({{mr, y}, {gc.x + p.rho, y}, edge_marker(EdgeKind::Wall, k)});
                cx.segs.push_back({{ml, y}, {mr, y}, edge_marker(EdgeKind::Mouth, k)});
            }
        }
        if (with_outer) {
            breaks.push_back(-W);
            breaks.push_back(W);
            std::sort(breaks.begin(), breaks.end());
            breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
            for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
                double a = breaks[i], b = breaks[i + 1];
                if (a < -W || b > W) continue;
                int marker = edge_marker(EdgeKind::Wall);
                for (const auto& m : mouths)
                    if (a >= m.lo && b <= m.hi) marker = edge_marker(EdgeKind::Mouth, m.k);
                cx.segs.push_back({{a, y}, {b, y}, marker});
            }
        }
    }
    for (std::size_t j = 0; j < which.size(); ++j) {
        int k = which[j];
        const auto& o = outlines[j];
        for (const Polyline* pl : {&o.left, &o.right})
            for (std::size_t i = 0; i + 1 < pl->size(); ++i)
                cx.segs.push_back({(*pl)[i], (*pl)[i + 1], edge_marker(EdgeKind::Wall, k)});
        for (const auto& s : o.separators) cx.segs.push_back({s.first, s.second, edge_marker(EdgeKind::Separator, k)});
        if (o.gamma_chord) cx.segs.push_back({o.gamma_chord->first, o.gamma_chord->second, edge_marker(EdgeKind::GammaChord, k)});
        const auto& p = spec.passages[k];
        Vec2 gp = guard_center(p, eps, +1), gm = guard_center(p, eps, -1);
        cx.regions.push_back({{gp.x, gp.y + 0.5 * p.rho}, region_tag(RegionKind::GuardPlus, k), 0.0});
        cx.regions.push_back({{gm.x, gm.y - 0.5 * p.rho}, region_tag(RegionKind::GuardMinus, k), 0.0});
    }
    if (with_outer) {
        int outer = edge_marker(EdgeKind::Outer);
        int lr = edge_marker(EdgeKind::LateralRight), ll = edge_marker(EdgeKind::LateralLeft);
        if (spec.lateral == Lateral::Neumann) lr = ll = outer;
        cx.segs.push_back({{-W, -L}, {W, -L}, outer});
        cx.segs.push_back({{W, L}, {-W, L}, outer});
        cx.segs.push_back({{W, -L}, {W, -eps}, lr});
        cx.segs.push_back({{W, eps}, {W, L}, lr});
        cx.segs.push_back({{-W, L}, {-W, eps}, ll});
        cx.segs.push_back({{-W, -eps}, {-W, -L}, ll});
        cx.regions.push_back({{0.0, 0.9 * L}, region_tag(RegionKind::OmegaPlus), 0.0});
        cx.regions.push_back({{0.0, -0.9 * L}, region_tag(RegionKind::OmegaMinus), 0.0});
        // Wall pieces between consecutive passages are holes.
        std::vector<std::pair<double, double>> extents;
        for (const auto& o : outlines) {
            double lo = 1e300, hi = -1e300;
            for (const auto& v : o.left) lo = std::min(lo, v.x), hi = std::max(hi, v.x);
            for (const auto& v : o.right) lo = std::min(lo, v.x), hi = std::max(hi, v.x);
            extents.push_back({lo, hi});
        }
        std::sort(extents.begin(), extents.end());
        double prev = -W;
        for (const auto& e : extents) {
            if (e.first > prev) cx.holes.push_back({0.5 * (prev + e.first), 0.0});
            prev = e.second;
        }
        if (W > prev) cx.holes.push_back({0.5 * (prev + W), 0.0});
    }
    return cx;
}

// Restricts the complex to x_n >= 0 and closes every passage with chords on x_n = 0.
Complex upper_half(const Complex& full, const SieveSpec& spec, const std::vector<int>& which) {
    Complex up;
    std::vector<Vec2> axis_points;
    for (const auto& s : full.segs) {
        if (edge_kind(s.marker) == EdgeKind::GammaChord) continue;
        Vec2 a = s.a, b = s.b;
        if (a.y < 0.0 && b.y < 0.0) continue;
        if (a.y <= 0.0 && b.y <= 0.0 && !(a.y == 0.0 && b.y == 0.0)) continue;
        if (a.y < 0.0 || b.y < 0.0) {
            Vec2 lo = a.y < 0.0 ? a : b, hi = a.y < 0.0 ? b : a;
            double t = hi.y / (hi.y - lo.y);
            Vec2 cut{hi.x + t * (lo.x - hi.x), 0.0};
            if (lo.x == hi.x) cut.x = lo.x;
            if (a.y < 0.0) a = cut;
            else b = cut;
        }
        up.segs.push_back({a, b, s.marker});
        if (a.y == 0.0) axis_points.push_back(a);
        if (b.y == 0.0) axis_points.push_back(b);
    }
    for (int k : which) {
        PassageOutline o = passage_outline(spec.passages[k], spec.eps);
        double lo = 1e300, hi = -1e300;
        for (const auto& v : o.left) lo = std::min(lo, v.x), hi = std::max(hi, v.x);
        for (const auto& v : o.right) lo = std::min(lo, v.x), hi = std::max(hi, v.x);
        std::vector<double> xs;
        for (const auto& p : axis_points)
            if (p.x >= lo && p.x <= hi) xs.push_back(p.x);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        if (xs.size() < 2) fail(ErrorKind::GeometryBuildFailed, "passage does not meet the plane x_n = 0");
        for (std::size_t i = 0; i + 1 < xs.size(); ++i)
            up.segs.push_back({{xs[i], 0.0}, {xs[i + 1], 0.0}, edge_marker(EdgeKind::GammaChord, k)});
    }
    for (const auto& r : full.regions)
        if (r.seed.y > 0.0) up.regions.push_back(r);
    return up;
}

Pslg to_pslg(const Complex& cx, const SieveSpec& spec, bool link_lateral) {
    PslgBuilder b(1e-13 * (spec.W + spec.L));
    int left_upper = -1, right_upper = -1, left_lower = -1, right_lower = -1;
    for (const auto& s : cx.segs) {
        int id = b.segment(s.a, s.b, s.marker);
        if (id < 0) continue;
        if (edge_kind(s.marker) == EdgeKind::LateralLeft) (s.a.y > 0 ? left_upper : left_lower) = id;
        if (edge_kind(s.marker) == EdgeKind::LateralRight) (s.a.y >= 0 ? right_upper : right_lower) = id;
    }
    if (link_lateral && spec.lateral == Lateral::Periodic) {
        auto link = [&](int l, int r) {
            if (l < 0 || r < 0) return;
            b.pslg.segments[l].link = r;
            b.pslg.segments[l].link_reversed = true;
            b.pslg.segments[r].link = l;
            b.pslg.segments[r].link_reversed = true;
        };
        link(left_upper, right_upper);
        link(left_lower, right_lower);
    }
    b.pslg.holes = cx.holes;
    b.pslg.regions = cx.regions;
    return b.pslg;
}

void tag_passages(Mesh& mesh, const SieveSpec& spec, const std::vector<int>& which) {
    std::vector<Polygon> polys;
    for (int k : which) polys.push_back(passage_outline(spec.passages[k], spec.eps).polygon());
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        if (mesh.region[t] != 0) continue;
        const auto& T = mesh.tris[t];
        Vec2 c = (1.0 / 3.0) * (mesh.nodes[T[0]] + mesh.nodes[T[1]] + mesh.nodes[T[2]]);
        for (std::size_t j = 0; j < which.size(); ++j) {
            if (point_in_polygon(c, polys[j])) {
                mesh.region[t] = region_tag(c.y > 0.0 ? RegionKind::PassageUpper : RegionKind::PassageLower, which[j]);
                break;
            }
        }
        if (mesh.region[t] == 0) fail(ErrorKind::MeshFailure, "triangle outside every tagged region");
    }
}

std::vector<std::pair<Vec2, Vec2>> passage_features(const SieveSpec& spec, const std::vector<int>& which) {
    std::vector<std::pair<Vec2, Vec2>> f;
    for (int k : which) {
        PassageOutline o = passage_outline(spec.passages[k], spec.eps);
        for (const Polyline* pl : {&o.left, &o.right})
            for (std::size_t i = 0; i + 1 < pl->size(); ++i) f.push_back({(*pl)[i], (*pl)[i + 1]});
        f.push_back({o.left.front(), o.right.front()});
        f.push_back({o.left.back(), o.right.back()});
        for (const auto& s : o.separators) f.push_back(s);
    }
    return f;
}

std::vector<int> all_passages(const SieveSpec& spec) {
    std::vector<int> w(spec.passages.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = static_cast<int>(k);
    return w;
}

Mesh mesh_complex(const ValidatedSpec& vspec, const std::vector<int>& which, bool with_outer,
                  const DomainMeshOptions& opts, int only_passage) {
    const SieveSpec& spec = vspec.spec();
    if (spec.n != 2) fail(ErrorKind::UnsupportedShape, "planar meshes require n = 2");
    build_cells(vspec);  // geometric consistency checks
    bool symmetric = opts.use_symmetry;
    for (int k : which) symmetric = symmetric && passage_symmetric(spec.passages[k], spec.eps);
    Complex full = build_complex(spec, which, with_outer);
    Complex cx = symmetric ? upper_half(full, spec, which) : full;
    Pslg pslg = to_pslg(cx, spec, with_outer);
    MeshParams mp;
    mp.h = opts.h;
    mp.grading = opts.grading;
    mp.min_angle_deg = opts.min_angle_deg;
    mp.max_vertices = opts.max_vertices;
    SizeField size = passage_size_field(vspec, opts, only_passage);
    Mesh mesh = triangulate(pslg, size, mp);
    tag_passages(mesh, spec, which);
    if (symmetric) mesh = mirror_lower(mesh, mirror_region, mirror_marker);
    if (with_outer && spec.lateral == Lateral::Periodic) pair_lateral_nodes(mesh);
    mesh.check();
    return mesh;
}

}  // namespace

double passage_min_feature(const Passage& p, double eps) {
    const auto& s = p.shape;
    switch (s.kind) {
    case ShapeKind::Straight: return s.d;
    case ShapeKind::Hourglass: return std::min(s.d, s.waist);
    case ShapeKind::VaryingWidth: {
        double m = 1e300;
        for (const auto& k : s.g.knots) m = std::min(m, 0.5 * (s.g(k.first) + s.h(k.first)));
        for (const auto& k : s.h.knots) m = std::min(m, 0.5 * (s.g(k.first) + s.h(k.first)));
        return m;
    }
    case ShapeKind::BumpedSquare: return face_radius(p, eps, +1);
    case ShapeKind::BumpedRect: {
        double xi = s.xi > 0.0 ? s.xi : 0.5 * eps;
        return std::min(s.d, 0.5 * std::pow(xi, 3.0 + s.alpha));
    }
    }
    return s.d;
}

bool passage_symmetric(const Passage& p, double eps) {
    if (face_radius(p, eps, +1) != face_radius(p, eps, -1)) return false;
    if (face_offset(p, eps, +1) != face_offset(p, eps, -1)) return false;
    PassageOutline o = passage_outline(p, eps);
    for (const Polyline* pl : {&o.left, &o.right}) {
        std::size_t n = pl->size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = (*pl)[i];
            const Vec2& b = (*pl)[n - 1 - i];
            if (a.x != b.x || a.y != -b.y) return false;
        }
    }
    for (const auto& s : o.separators) {
        bool found = false;
        for (const auto& t : o.separators) {
            bool same = (t.first.x == s.first.x && t.first.y == -s.first.y && t.second.x == s.second.x &&
                         t.second.y == -s.second.y) ||
                        (t.first.x == s.second.x && t.first.y == -s.second.y && t.second.x == s.first.x &&
                         t.second.y == -s.first.y);
            if (same) found = true;
        }
        if (!found) return false;
    }
    return true;
}

namespace {

// Each feature segment gets its own size: an eighth of the gap to the nearest segment that does not
// touch it, measured from its midpoint. Segments of long thin channels are relaxed so that the
// channel may be filled with flat triangles instead of a fine isotropic mesh.
SizeField local_size_field(std::vector<std::pair<Vec2, Vec2>> segs, double h, double grading) {
    if (!(grading > 0.0)) fail(ErrorKind::MeshFailure, "grading must be positive");
    const std::size_t n = segs.size();
    const double touch = 1e-12 * (1.0 + h);
    auto shares = [&](const std::pair<Vec2, Vec2>& a, const std::pair<Vec2, Vec2>& b) {
        for (Vec2 p : {a.first, a.second})
            for (Vec2 q : {b.first, b.second})
                if (dist(p, q) <= touch) return true;
        return false;
    };
    struct Feature {
        Vec2 a, b;
        double h0, lo, hi;
    };
    std::vector<Feature> feats;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = segs[i];
        const double len = dist(s.first, s.second);
        if (len <= touch) continue;
        const Vec2 mid = 0.5 * (s.first + s.second);
        double gap = 1e300;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || shares(s, segs[j])) continue;
            if (dist(segs[j].first, segs[j].second) <= touch) continue;
            gap = std::min(gap, point_segment_distance(mid, segs[j].first, segs[j].second));
        }
        if (gap > 1e299) gap = len;
        double h0 = gap / 8.0;
        if (len > 64.0 * gap) h0 = std::max(h0, len / 512.0);
        h0 = std::min(h0, h);
        feats.push_back({s.first, s.second, h0, std::min(s.first.x, s.second.x), std::max(s.first.x, s.second.x)});
    }
    std::sort(feats.begin(), feats.end(), [](const Feature& a, const Feature& b) { return a.lo < b.lo; });
    double hmin = h;
    for (const Feature& f : feats) hmin = std::min(hmin, f.h0);
    return [feats = std::move(feats), h, grading, hmin](Vec2 p) {
        double best = h;
        for (const Feature& f : feats) {
            if (f.lo > p.x + (best - hmin) / grading) break;
            const double reach = (best - f.h0) / grading;
            if (reach <= 0.0 || f.hi < p.x - reach) continue;
            best = std::min(best, f.h0 + grading * point_segment_distance(p, f.a, f.b));
        }
        return best;
    };
}

}  // namespace

SizeField passage_size_field(const ValidatedSpec& vspec, const DomainMeshOptions& opts, int only_passage) {
    const SieveSpec& spec = vspec.spec();
    std::vector<int> which = only_passage >= 0 ? std::vector<int>{only_passage} : all_passages(spec);
    MeshParams mp;
    mp.h = opts.h;
    mp.grading = opts.grading;
    if (which.empty()) {
        mp.h_neck = 0.0;
        return graded_size(mp, {});
    }
    double feature = 1e300;
    for (int k : which) feature = std::min(feature, passage_min_feature(spec.passages[k], spec.eps));
    if (opts.h_neck > 0.0 && opts.h_neck > feature / 4.0 * (1.0 + 1e-12))
        fail(ErrorKind::MeshFailure, "neck size exceeds a quarter of the smallest passage feature");
    if (opts.h_neck > 0.0) {
        mp.h_neck = std::min(opts.h_neck, opts.h);
        return graded_size(mp, passage_features(spec, which));
    }
    return local_size_field(passage_features(spec, which), opts.h, opts.grading);
}

Mesh mesh_perforated(const ValidatedSpec& spec, const DomainMeshOptions& opts) {
    return mesh_complex(spec, all_passages(spec.spec()), true, opts, -1);
}

Mesh mesh_cell(const ValidatedSpec& spec, int k, const DomainMeshOptions& opts) {
    if (k < 0 || k >= static_cast<int>(spec->passages.size()))
        fail(ErrorKind::GeometryBuildFailed, "cell index out of range");
    return mesh_complex(spec, {k}, false, opts, k);
}

Mesh mesh_homogenized(double W, double L, Lateral lateral, double h) {
    Pslg g;
    int a = g.add_point({-W, 0.0}), b = g.add_point({W, 0.0}), c = g.add_point({W, L}), d = g.add_point({-W, L});
    int lr = lateral == Lateral::Periodic ? edge_marker(EdgeKind::LateralRight) : edge_marker(EdgeKind::Outer);
    int ll = lateral == Lateral::Periodic ? edge_marker(EdgeKind::LateralLeft) : edge_marker(EdgeKind::Outer);
    g.add_segment(a, b, edge_marker(EdgeKind::Gamma));
    int right = g.add_segment(b, c, lr);
    g.add_segment(c, d, edge_marker(EdgeKind::Outer));
    int left = g.add_segment(d, a, ll);
    if (lateral == Lateral::Periodic) {
        g.segments[right].link = left;
        g.segments[right].link_reversed = true;
        g.segments[left].link = right;
        g.segments[left].link_reversed = true;
    }
    g.regions.push_back({{0.0, 0.5 * L}, region_tag(RegionKind::Upper), 0.0});
    MeshParams mp;
    mp.h = h;
    Mesh up = triangulate(g, mp);
    Mesh m = mirror_lower(up, mirror_region, mirror_marker);
    if (lateral == Lateral::Periodic) pair_lateral_nodes(m);
    m = double_interface(m, edge_marker(EdgeKind::Gamma), is_lower_tag);
    m.check();
    return m;
}

int mirror_region(int tag) {
    int k = tag_index(tag);
    switch (region_kind(tag)) {
    case RegionKind::OmegaPlus: return region_tag(RegionKind::OmegaMinus, k);
    case RegionKind::OmegaMinus: return region_tag(RegionKind::OmegaPlus, k);
    case RegionKind::GuardPlus: return region_tag(RegionKind::GuardMinus, k);
    case RegionKind::GuardMinus: return region_tag(RegionKind::GuardPlus, k);
    case RegionKind::PassageUpper: return region_tag(RegionKind::PassageLower, k);
    case RegionKind::PassageLower: return region_tag(RegionKind::PassageUpper, k);
    case RegionKind::Upper: return region_tag(RegionKind::Lower, k);
    case RegionKind::Lower: return region_tag(RegionKind::Upper, k);
    default: return tag;
    }
}

int mirror_marker(int marker) {
    int k = marker % kTagBase;
    switch (edge_kind(marker)) {
    case EdgeKind::SPlus: return edge_marker(EdgeKind::SMinus, k);
    case EdgeKind::SMinus: return edge_marker(EdgeKind::SPlus, k);
    default: return marker;
    }
}

}  // namespace sieve

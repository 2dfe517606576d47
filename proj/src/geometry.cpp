#include "sieve/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sieve/config.hpp"

namespace sieve {

namespace {

constexpr double kRelTol = 1e-12;

bool le(double a, double b) { return a <= b + kRelTol * std::max(std::abs(a), std::abs(b)); }

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

double polygon_area(const Polygon& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

// Horizontal extent [xmin, xmax] of a passage outline.
std::pair<double, double> outline_extent(const PassageOutline& o) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : o.left) lo = std::min(lo, v.x), hi = std::max(hi, v.x);
    for (const auto& v : o.right) lo = std::min(lo, v.x), hi = std::max(hi, v.x);
    return {lo, hi};
}

}  // namespace

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return dist(p, a + t * ab);
}

const char* shape_name(ShapeKind kind) {
    switch (kind) {
    case ShapeKind::Straight: return "straight";
    case ShapeKind::Hourglass: return "hourglass";
    case ShapeKind::VaryingWidth: return "varying";
    case ShapeKind::BumpedSquare: return "bridge";
    case ShapeKind::BumpedRect: return "bump";
    }
    return "unknown";
}

ShapeKind parse_shape(const std::string& name) {
    if (name == "straight") return ShapeKind::Straight;
    if (name == "hourglass") return ShapeKind::Hourglass;
    if (name == "varying") return ShapeKind::VaryingWidth;
    if (name == "bridge") return ShapeKind::BumpedSquare;
    if (name == "bump") return ShapeKind::BumpedRect;
    fail(ErrorKind::ConfigError, "unknown passage shape '" + name + "'");
}

double Profile::operator()(double t) const {
    if (knots.empty()) return 0.0;
    if (t <= knots.front().first) return knots.front().second;
    if (t >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double v, const std::pair<double, double>& k) { return v < k.first; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    double s = (t - a.first) / (b.first - a.first);
    return a.second + s * (b.second - a.second);
}

double Profile::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& k : knots) m = std::max(m, k.second);
    return m;
}

double Profile::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& k : knots) m = std::min(m, k.second);
    return m;
}

double Profile::max_slope() const {
    double m = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        double dt = knots[i].first - knots[i - 1].first;
        if (dt > 0) m = std::max(m, std::abs(knots[i].second - knots[i - 1].second) / dt);
    }
    return m;
}

Profile tent_profile(double eps, double d, double a) { return Profile{{{-eps, d}, {0.0, a}, {eps, d}}}; }
Profile constant_profile(double eps, double d) { return Profile{{{-eps, d}, {0.0, d}, {eps, d}}}; }

PassageShape PassageShape::straight(double d) {
    PassageShape s;
    s.kind = ShapeKind::Straight;
    s.d = d;
    return s;
}

PassageShape PassageShape::hourglass(double mouth, double waist) {
    PassageShape s;
    s.kind = ShapeKind::Hourglass;
    s.d = mouth;
    s.waist = waist;
    return s;
}

PassageShape PassageShape::varying(Profile g, Profile h) {
    PassageShape s;
    s.kind = ShapeKind::VaryingWidth;
    s.g = std::move(g);
    s.h = std::move(h);
    return s;
}

PassageShape PassageShape::bridge(double alpha) {
    PassageShape s;
    s.kind = ShapeKind::BumpedSquare;
    s.alpha = alpha;
    return s;
}

PassageShape PassageShape::bump(double d, double alpha, double xi) {
    PassageShape s;
    s.kind = ShapeKind::BumpedRect;
    s.d = d;
    s.alpha = alpha;
    s.xi = xi;
    return s;
}

namespace {

double bridge_half_width(const PassageShape& s, double eps) {
    return s.d > 0.0 ? s.d : std::pow(eps, 3.0 + s.alpha);
}

double bump_xi(const PassageShape& s, double eps) { return s.xi > 0.0 ? s.xi : 0.5 * eps; }

}  // namespace

double face_radius(const Passage& p, double eps, int side) {
    const auto& s = p.shape;
    switch (s.kind) {
    case ShapeKind::Straight:
    case ShapeKind::Hourglass:
    case ShapeKind::BumpedRect:
        return s.d;
    case ShapeKind::BumpedSquare:
        return bridge_half_width(s, eps);
    case ShapeKind::VaryingWidth: {
        double t = side > 0 ? eps : -eps;
        return 0.5 * (s.g(t) + s.h(t));
    }
    }
    return 0.0;
}

double face_offset(const Passage& p, double eps, int side) {
    if (p.shape.kind != ShapeKind::VaryingWidth) return 0.0;
    double t = side > 0 ? eps : -eps;
    return 0.5 * (p.shape.h(t) - p.shape.g(t));
}

Vec2 guard_center(const Passage& p, double eps, int side) {
    return {p.center + face_offset(p, eps, side), side > 0 ? eps : -eps};
}

Polygon PassageOutline::polygon() const {
    Polygon poly;
    poly.push_back(left.front());
    for (const auto& v : right) poly.push_back(v);
    for (std::size_t i = left.size() - 1; i >= 1; --i) poly.push_back(left[i]);
    return poly;
}

PassageOutline passage_outline(const Passage& p, double eps) {
    const auto& s = p.shape;
    const double c = p.center;
    PassageOutline o;
    switch (s.kind) {
    case ShapeKind::Straight: {
        double d = s.d;
        o.left = {{c - d, -eps}, {c - d, 0.0}, {c - d, eps}};
        o.right = {{c + d, -eps}, {c + d, 0.0}, {c + d, eps}};
        o.gamma_chord = std::make_pair(Vec2{c - d, 0.0}, Vec2{c + d, 0.0});
        break;
    }
    case ShapeKind::Hourglass: {
        double a = s.d, b = s.waist;
        o.left = {{c - a, -eps}, {c - b, 0.0}, {c - a, eps}};
        o.right = {{c + a, -eps}, {c + b, 0.0}, {c + a, eps}};
        o.gamma_chord = std::make_pair(Vec2{c - b, 0.0}, Vec2{c + b, 0.0});
        break;
    }
    case ShapeKind::VaryingWidth: {
        std::vector<double> ts;
        for (const auto& k : s.g.knots) ts.push_back(k.first);
        for (const auto& k : s.h.knots) ts.push_back(k.first);
        ts.push_back(0.0);
        ts.push_back(-eps);
        ts.push_back(eps);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        for (double t : ts) {
            if (t < -eps || t > eps) continue;
            o.left.push_back({c - s.g(t), t});
            o.right.push_back({c + s.h(t), t});
        }
        o.gamma_chord = std::make_pair(Vec2{c - s.g(0.0), 0.0}, Vec2{c + s.h(0.0), 0.0});
        break;
    }
    case ShapeKind::BumpedSquare: {
        double d = bridge_half_width(s, eps);
        double r = eps / 3.0;
        o.left = {{c - d, -eps}, {c - d, -r}, {c - r, -r}, {c - r, 0.0}, {c - r, r}, {c - d, r}, {c - d, eps}};
        o.right = {{c + d, -eps}, {c + d, -r}, {c + r, -r}, {c + r, 0.0}, {c + r, r}, {c + d, r}, {c + d, eps}};
        o.separators = {{{c - d, -r}, {c + d, -r}}, {{c - d, r}, {c + d, r}}};
        o.gamma_chord = std::make_pair(Vec2{c - r, 0.0}, Vec2{c + r, 0.0});
        break;
    }
    case ShapeKind::BumpedRect: {
        double d = s.d;
        double xi = bump_xi(s, eps);
        double hs = 0.5 * std::pow(xi, 3.0 + s.alpha);
        double x1 = c + d, x2 = c + d + xi, x3 = c + d + 2.0 * xi;
        o.left = {{c - d, -eps}, {c - d, 0.0}, {c - d, eps}};
        o.right = {{x1, -eps}, {x1, -hs}, {x2, -hs}, {x2, -0.5 * xi}, {x3, -0.5 * xi},
                   {x3, 0.5 * xi}, {x2, 0.5 * xi}, {x2, hs}, {x1, hs}, {x1, eps}};
        o.separators = {{{x1, -hs}, {x1, hs}}, {{x2, -hs}, {x2, hs}}};
        break;
    }
    }
    return o;
}

double passage_area(const Passage& p, double eps) { return polygon_area(passage_outline(p, eps).polygon()); }

Polygon half_disk(Vec2 center, double radius, int side, int segments) {
    Polygon poly;
    poly.reserve(segments + 1);
    // Endpoints are placed exactly on the face so that neighbouring disks can share them.
    if (side > 0) {
        poly.push_back({center.x + radius, center.y});
        for (int j = 1; j < segments; ++j) {
            double th = M_PI * j / segments;
            poly.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
        }
        poly.push_back({center.x - radius, center.y});
    } else {
        poly.push_back({center.x - radius, center.y});
        for (int j = 1; j < segments; ++j) {
            double th = M_PI + M_PI * j / segments;
            poly.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
        }
        poly.push_back({center.x + radius, center.y});
    }
    return poly;
}

std::vector<Violation> check_spec(const SieveSpec& spec) {
    std::vector<Violation> out;
    auto add = [&](ErrorKind k, const std::string& c, const std::string& m, int i) {
        out.push_back({k, c, m, i});
    };
    if (!(spec.n == 2 || spec.n == 3)) add(ErrorKind::Eps0Violated, "dimension", "n must be 2 or 3", -1);
    if (!(spec.eps > 0.0) || !std::isfinite(spec.eps) || !(spec.L > 0.0) || !(spec.W > 0.0))
        add(ErrorKind::Eps0Violated, "positive_lengths", "eps, L and W must be finite and positive", -1);
    if (!le(spec.eps, spec.L / 8.0))
        add(ErrorKind::Eps0Violated, "eps_le_L_over_8",
            "eps=" + fmt(spec.eps) + " exceeds L/8=" + fmt(spec.L / 8.0), -1);
    for (std::size_t k = 0; k < spec.passages.size(); ++k) {
        const auto& p = spec.passages[k];
        int ki = static_cast<int>(k);
        const auto& s = p.shape;
        bool degenerate = false;
        switch (s.kind) {
        case ShapeKind::Straight: degenerate = !(s.d > 0.0); break;
        case ShapeKind::Hourglass: degenerate = !(s.d > 0.0 && s.waist > 0.0); break;
        case ShapeKind::VaryingWidth:
            degenerate = s.g.knots.size() < 2 || s.h.knots.size() < 2 || !(s.g.min_value() > 0.0) ||
                         !(s.h.min_value() > 0.0);
            if (!degenerate) {
                auto covers = [&](const Profile& f) {
                    return std::abs(f.knots.front().first + spec.eps) <= 1e-12 * spec.eps &&
                           std::abs(f.knots.back().first - spec.eps) <= 1e-12 * spec.eps;
                };
                if (!covers(s.g) || !covers(s.h)) degenerate = true;
            }
            break;
        case ShapeKind::BumpedSquare:
            degenerate = !(s.alpha > 0.0) || !(bridge_half_width(s, spec.eps) < spec.eps / 3.0);
            break;
        case ShapeKind::BumpedRect: {
            double xi = bump_xi(s, spec.eps);
            degenerate = !(s.d > 0.0) || !(s.alpha > 0.0) || !(xi > 0.0) || !(xi < 2.0 * spec.eps);
            break;
        }
        }
        if (degenerate) {
            add(ErrorKind::DegenerateProfile, "positive_width",
                std::string("passage ") + std::to_string(k) + " (" + shape_name(s.kind) +
                    ") has a non-positive or inconsistent width",
                ki);
            continue;
        }
        if (!(p.rho > 0.0)) {
            add(ErrorKind::Eps0Violated, "positive_rho", "guard radius must be positive", ki);
            continue;
        }
        if (!le(p.rho, spec.L / 4.0))
            add(ErrorKind::Eps0Violated, "rho_le_L_over_4",
                "passage " + std::to_string(k) + ": rho=" + fmt(p.rho) + " exceeds L/4", ki);
        if (spec.n == 2 && !le(p.rho, 0.5))
            add(ErrorKind::Eps0Violated, "rho_le_half",
                "passage " + std::to_string(k) + ": rho=" + fmt(p.rho) + " exceeds 1/2", ki);
        for (int side : {+1, -1}) {
            double d = face_radius(p, spec.eps, side);
            const char* sname = side > 0 ? "d+" : "d-";
            if (!le(d / p.rho, 0.25))
                add(ErrorKind::Eps0Violated, "d_over_rho_le_quarter",
                    "passage " + std::to_string(k) + ": " + sname + "/rho=" + fmt(d / p.rho) + " exceeds 1/4", ki);
            if (spec.n == 2) {
                double ratio = std::abs(std::log(p.rho)) / std::abs(std::log(d));
                if (!(d < 1.0) || !le(ratio, 0.5))
                    add(ErrorKind::Eps0Violated, "log_ratio_le_half",
                        "passage " + std::to_string(k) + ": |ln " + sname + "|^-1 |ln rho|=" + fmt(ratio) +
                            " exceeds 1/2",
                        ki);
            }
        }
    }
    // Guard balls on the same side must be pairwise disjoint (touching allowed).
    const double period = 2.0 * spec.W;
    for (int side : {+1, -1}) {
        for (std::size_t i = 0; i < spec.passages.size(); ++i) {
            for (std::size_t j = i + 1; j < spec.passages.size(); ++j) {
                const auto& a = spec.passages[i];
                const auto& b = spec.passages[j];
                if (!(a.rho > 0.0 && b.rho > 0.0)) continue;
                double dx = std::abs(guard_center(a, spec.eps, side).x - guard_center(b, spec.eps, side).x);
                if (spec.lateral == Lateral::Periodic) dx = std::min(dx, std::abs(period - dx));
                if (!le(a.rho + b.rho, dx))
                    add(ErrorKind::GuardOverlap, "guards_disjoint",
                        "guard balls of passages " + std::to_string(i) + " and " + std::to_string(j) +
                            (side > 0 ? " (upper)" : " (lower)") + " overlap",
                        static_cast<int>(i));
            }
        }
    }
    return out;
}

ValidatedSpec validate_spec(const SieveSpec& spec) {
    auto v = check_spec(spec);
    if (!v.empty()) {
        std::string msg;
        for (const auto& x : v) {
            if (!msg.empty()) msg += "; ";
            msg += "[" + x.constraint + "] " + x.message;
        }
        fail(v.front().kind, msg);
    }
    return ValidatedSpec(spec);
}

DomainPolygons build_cells(const ValidatedSpec& vspec) {
    const SieveSpec& spec = vspec.spec();
    const double eps = spec.eps, W = spec.W, L = spec.L;
    if (spec.n != 2) fail(ErrorKind::UnsupportedShape, "polygonal domains are built for n = 2 only");
    DomainPolygons out;
    out.omega = {{-W, -L}, {W, -L}, {W, L}, {-W, L}};
    out.gamma = {{-W, 0.0}, {W, 0.0}};

    std::vector<int> order(spec.passages.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return spec.passages[a].center < spec.passages[b].center; });

    std::vector<PassageOutline> outlines;
    for (const auto& p : spec.passages) outlines.push_back(passage_outline(p, eps));

    // Passages must lie inside the strip and must not touch each other.
    double prev_hi = -W;
    for (std::size_t r = 0; r < order.size(); ++r) {
        auto [lo, hi] = outline_extent(outlines[order[r]]);
        bool first = r == 0;
        if (lo < -W || hi > W || (first ? lo < prev_hi : lo <= prev_hi))
            fail(ErrorKind::GeometryBuildFailed,
                 "passage " + std::to_string(order[r]) + " leaves the strip or overlaps its neighbour");
        prev_hi = hi;
        for (int side : {+1, -1}) {
            const auto& p = spec.passages[order[r]];
            Vec2 gc = guard_center(p, eps, side);
            if (gc.x - p.rho < -W * (1 + kRelTol) || gc.x + p.rho > W * (1 + kRelTol))
                fail(ErrorKind::GeometryBuildFailed,
                     "guard ball of passage " + std::to_string(order[r]) + " leaves the strip");
            const auto& ol = outlines[order[r]];
            double face_lo = side > 0 ? ol.left.back().x : ol.left.front().x;
            double face_hi = side > 0 ? ol.right.back().x : ol.right.front().x;
            if (gc.x - p.rho > face_lo || gc.x + p.rho < face_hi)
                fail(ErrorKind::GeometryBuildFailed,
                     "mouth of passage " + std::to_string(order[r]) + " is not covered by its guard ball");
        }
    }

    // Cells.
    for (std::size_t k = 0; k < spec.passages.size(); ++k) {
        const auto& p = spec.passages[k];
        const auto& o = outlines[k];
        CellGeometry cell;
        cell.index = static_cast<int>(k);
        cell.passage = o.polygon();
        cell.area_T = polygon_area(cell.passage);
        Vec2 cp = guard_center(p, eps, +1), cm = guard_center(p, eps, -1);
        cell.guard_plus = half_disk(cp, p.rho, +1, spec.arc_segments);
        cell.guard_minus = half_disk(cm, p.rho, -1, spec.arc_segments);
        cell.area_Bplus = polygon_area(cell.guard_plus);
        cell.area_Bminus = polygon_area(cell.guard_minus);
        auto push = [&](Vec2 v, CellMarker m) {
            cell.boundary.push_back(v);
            cell.edge_marker.push_back(m);
        };
        // Upper arc from (c+R, eps) over the top to (c-R, eps).
        for (std::size_t i = 0; i + 1 < cell.guard_plus.size(); ++i) push(cell.guard_plus[i], CellMarker::SPlus);
        push(cell.guard_plus.back(), CellMarker::Wall);
        // Top face to the top-left mouth corner, then down the left wall.
        for (std::size_t i = o.left.size(); i-- > 1;) push(o.left[i], CellMarker::Wall);
        push(o.left.front(), CellMarker::Wall);
        // Bottom face to (c-R, -eps), lower arc to (c+R, -eps).
        for (std::size_t i = 0; i + 1 < cell.guard_minus.size(); ++i) push(cell.guard_minus[i], CellMarker::SMinus);
        push(cell.guard_minus.back(), CellMarker::Wall);
        for (std::size_t i = 0; i < o.right.size(); ++i) push(o.right[i], CellMarker::Wall);
        // The last edge closes from the top-right mouth corner to (c+R, eps).
        out.cells.push_back(std::move(cell));
    }

    // Omega_eps components.
    if (spec.passages.empty()) {
        out.omega_eps.push_back({{{-W, -L}, {W, -L}, {W, -eps}, {-W, -eps}}, {}});
        out.omega_eps.push_back({{{-W, eps}, {W, eps}, {W, L}, {-W, L}}, {}});
        out.sieve_pieces.push_back({{-W, -eps}, {W, -eps}, {W, eps}, {-W, eps}});
        return out;
    }
    const auto& first = outlines[order.front()];
    const auto& last = outlines[order.back()];
    PolygonWithHoles comp;
    auto& outer = comp.outer;
    outer.push_back({-W, -L});
    outer.push_back({W, -L});
    outer.push_back({W, -eps});
    // Bottom face of the rightmost wall piece, then up the right wall of the last passage.
    for (const auto& v : last.right) outer.push_back(v);
    outer.push_back({W, eps});
    outer.push_back({W, L});
    outer.push_back({-W, L});
    outer.push_back({-W, eps});
    for (std::size_t i = first.left.size(); i-- > 0;) outer.push_back(first.left[i]);
    outer.push_back({-W, -eps});
    // Wall pieces between consecutive passages are holes (clockwise).
    for (std::size_t r = 0; r + 1 < order.size(); ++r) {
        const auto& a = outlines[order[r]];
        const auto& b = outlines[order[r + 1]];
        Polygon piece;
        for (const auto& v : a.right) piece.push_back(v);
        for (std::size_t i = b.left.size(); i-- > 0;) piece.push_back(b.left[i]);
        out.sieve_pieces.push_back(piece);
        Polygon hole(piece.rbegin(), piece.rend());
        comp.holes.push_back(hole);
    }
    // End pieces between the lateral boundary and the outer passages.
    {
        Polygon lp{{-W, -eps}};
        for (const auto& v : first.left) lp.push_back(v);
        lp.push_back({-W, eps});
        if (polygon_area(lp) < 0) std::reverse(lp.begin(), lp.end());
        out.sieve_pieces.push_back(lp);
        Polygon rp;
        for (const auto& v : last.right) rp.push_back(v);
        rp.push_back({W, eps});
        rp.push_back({W, -eps});
        if (polygon_area(rp) < 0) std::reverse(rp.begin(), rp.end());
        out.sieve_pieces.push_back(rp);
    }
    out.omega_eps.push_back(std::move(comp));
    return out;
}

double capacity_scale_function(double t, int n) {
    if (n == 2) return -std::log(t);
    return std::pow(t, 2.0 - n);
}

ScaleReport scale_report(const ValidatedSpec& vspec, double zeta, double kappa) {
    const SieveSpec& spec = vspec.spec();
    if (zeta < 0.0 || kappa < 0.0) fail(ErrorKind::NonPositiveData, "zeta and kappa must be non-negative");
    ScaleReport r;
    const int n = spec.n;
    double dmax = 0.0;
    for (const auto& p : spec.passages) {
        PassageScales ps;
        for (int side : {+1, -1}) {
            double d = face_radius(p, spec.eps, side);
            double gam = 1.0 / (capacity_scale_function(d, n) * std::pow(p.rho, n - 1));
            double ratio = d / p.rho;
            double eta = 0.0;
            if (n == 2) eta = std::pow(std::abs(std::log(ratio)), -0.5);
            else if (n == 3) eta = std::sqrt(ratio);
            else if (n == 4) eta = ratio * std::abs(std::log(ratio));
            else eta = ratio;
            (side > 0 ? ps.gamma_plus : ps.gamma_minus) = gam;
            (side > 0 ? ps.eta_plus : ps.eta_minus) = eta;
            dmax = std::max(dmax, d);
        }
        r.gamma = std::max({r.gamma, ps.gamma_plus, ps.gamma_minus});
        r.eta = std::max({r.eta, ps.eta_plus, ps.eta_minus});
        r.rho = std::max(r.rho, p.rho);
        r.passages.push_back(ps);
    }
    r.chi = std::min(r.eta, std::sqrt(r.rho));
    if (!spec.passages.empty()) {
        double per = spec.period > 0.0 ? spec.period : 2.0 * r.rho;
        r.p = 1.0 / (capacity_scale_function(dmax, n) * std::pow(per, n - 1));
        r.q = std::pow(dmax, n - 1) / (spec.eps * std::pow(per, n - 1));
    }
    r.sqrt_eps = std::sqrt(spec.eps);
    r.zeta = zeta;
    r.kappa = kappa;
    r.sigma = std::max({r.sqrt_eps, zeta, kappa, r.chi});
    return r;
}

ValidatedSpec periodic_family(double p, double q, double rho, int n, const FamilyOptions& opts) {
    if (!(p > 0.0) || !(q > 0.0) || !(rho > 0.0))
        fail(ErrorKind::InfeasibleScales, "periodic family needs p > 0, q > 0 and rho > 0");
    if (n != 2 && n != 3) fail(ErrorKind::InfeasibleScales, "periodic family supports n = 2 or 3");
    double cells = 2.0 * opts.W / rho;
    long count = std::lround(cells);
    if (count < 1 || std::abs(cells - static_cast<double>(count)) > 1e-9 * cells)
        fail(ErrorKind::InfeasibleScales, "period rho=" + fmt(rho) + " does not divide the strip width 2W");
    double d = 0.0, eps = 0.0;
    if (n == 2) {
        d = std::exp(-1.0 / (p * rho));
        eps = std::isinf(q) ? d : d / (q * rho);
    } else {
        d = p * rho * rho;
        eps = std::isinf(q) ? d : d * d / (q * rho * rho);
    }
    SieveSpec s;
    s.n = n;
    s.eps = eps;
    s.L = opts.L;
    s.W = opts.W;
    s.lateral = opts.lateral;
    s.period = rho;
    for (long k = 0; k < count; ++k) {
        Passage ps;
        ps.center = -opts.W + 0.5 * rho + static_cast<double>(k) * rho;
        ps.shape = PassageShape::straight(d);
        ps.rho = 0.5 * rho;
        s.passages.push_back(ps);
    }
    auto v = check_spec(s);
    if (!v.empty()) {
        std::string msg = "resulting scales violate the admissibility constraints:";
        for (const auto& x : v) msg += " [" + x.constraint + "] " + x.message + ";";
        fail(ErrorKind::InfeasibleScales, msg);
    }
    return validate_spec(s);
}

SieveSpec spec_from_config(const Config& cfg) {
    if (cfg.has("family.p")) {
        FamilyOptions fo;
        fo.W = cfg.get_double("domain.W", 0.5);
        fo.L = cfg.get_double("domain.L", 1.0);
        std::string lat = cfg.get_string("domain.lateral", "periodic");
        fo.lateral = lat == "neumann" ? Lateral::Neumann : Lateral::Periodic;
        int n = static_cast<int>(cfg.get_int("domain.n", 2));
        double q = cfg.get_double("family.q", std::numeric_limits<double>::infinity());
        SieveSpec s = periodic_family(cfg.get_double("family.p"), q, cfg.get_double("family.rho"), n, fo).spec();
        s.arc_segments = static_cast<int>(cfg.get_int("domain.arc_segments", s.arc_segments));
        return s;
    }
    SieveSpec s;
    s.n = static_cast<int>(cfg.get_int("domain.n", 2));
    s.eps = cfg.get_double("domain.eps");
    s.L = cfg.get_double("domain.L", 1.0);
    s.W = cfg.get_double("domain.W", 0.5);
    std::string lat = cfg.get_string("domain.lateral", "periodic");
    if (lat != "periodic" && lat != "neumann")
        fail(ErrorKind::ConfigError, "domain.lateral must be 'periodic' or 'neumann'");
    s.lateral = lat == "neumann" ? Lateral::Neumann : Lateral::Periodic;
    s.period = cfg.get_double("domain.period", 0.0);
    s.arc_segments = static_cast<int>(cfg.get_int("domain.arc_segments", 64));
    long count = cfg.get_int("passages.count", 0);
    for (long k = 0; k < count; ++k) {
        std::string pre = "passage." + std::to_string(k) + ".";
        Passage p;
        p.center = cfg.get_double(pre + "center");
        p.rho = cfg.get_double(pre + "rho");
        ShapeKind kind = parse_shape(cfg.get_string(pre + "shape", "straight"));
        switch (kind) {
        case ShapeKind::Straight: p.shape = PassageShape::straight(cfg.get_double(pre + "d")); break;
        case ShapeKind::Hourglass:
            p.shape = PassageShape::hourglass(cfg.get_double(pre + "d"), cfg.get_double(pre + "waist"));
            break;
        case ShapeKind::VaryingWidth: {
            if (cfg.has(pre + "tent_a")) {
                double d = cfg.get_double(pre + "d");
                double a = cfg.get_double(pre + "tent_a");
                p.shape = PassageShape::varying(tent_profile(s.eps, d, a), tent_profile(s.eps, d, a));
            } else {
                auto read = [&](const std::string& name) {
                    auto ts = cfg.get_doubles(pre + name + "_t");
                    auto vs = cfg.get_doubles(pre + name + "_v");
                    if (ts.size() != vs.size() || ts.size() < 2)
                        fail(ErrorKind::ConfigError, pre + name + ": knot lists must have equal length >= 2");
                    Profile pr;
                    for (std::size_t i = 0; i < ts.size(); ++i) pr.knots.push_back({ts[i], vs[i]});
                    return pr;
                };
                p.shape = PassageShape::varying(read("g"), read("h"));
            }
            break;
        }
        case ShapeKind::BumpedSquare:
            p.shape = PassageShape::bridge(cfg.get_double(pre + "alpha", 1.0));
            p.shape.d = cfg.get_double(pre + "d", 0.0);
            break;
        case ShapeKind::BumpedRect:
            p.shape = PassageShape::bump(cfg.get_double(pre + "d"), cfg.get_double(pre + "alpha", 1.0),
                                         cfg.get_double(pre + "xi", 0.0));
            break;
        }
        s.passages.push_back(p);
    }
    return s;
}

}  // namespace sieve

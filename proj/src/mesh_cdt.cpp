#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <utility>

#include "sieve/error.hpp"
#include "sieve/mesh.hpp"
#include "sieve/predicates.hpp"

namespace sieve {

int Pslg::add_point(Vec2 p) {
    points.push_back(p);
    return static_cast<int>(points.size()) - 1;
}

int Pslg::add_segment(int a, int b, int marker) {
    Segment s;
    s.a = a;
    s.b = b;
    s.marker = marker;
    segments.push_back(s);
    return static_cast<int>(segments.size()) - 1;
}

std::vector<int> Pslg::add_polyline(const std::vector<Vec2>& pts, int marker, bool closed) {
    std::vector<int> ids;
    for (const auto& p : pts) ids.push_back(add_point(p));
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) add_segment(ids[i], ids[i + 1], marker);
    if (closed && ids.size() > 2) add_segment(ids.back(), ids.front(), marker);
    return ids;
}

namespace {

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};
    std::array<int, 3> seg{-1, -1, -1};
    int region = 0;
    bool alive = false;
};

struct Sub {
    int a = 0, b = 0;
    int input = 0;
    double ta = 0.0, tb = 1.0;
    bool alive = true;
};

struct NewTri {
    int a, b, c;
    int region;
};

// Directed boundary edge of a cavity together with what lies outside it.
struct CavityEdge {
    int u, w;
    int outside;
    int seg;
    int owner;
};

inline int nxt(int i) { return i == 2 ? 0 : i + 1; }
inline int prv(int i) { return i == 0 ? 2 : i - 1; }

class Triangulator {
public:
    Triangulator(const Pslg& in, const SizeField& size, const MeshParams& params)
        : in_(in), size_(size), params_(params) {}

    Mesh run();

private:
    const Pslg& in_;
    const SizeField& size_;
    const MeshParams& params_;

    std::vector<Vec2> pts_;
    std::vector<char> is_input_;
    std::vector<int> vert_tri_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::vector<Sub> subs_;
    std::vector<Pslg::Segment> segs_;          // input segments after point merging
    std::vector<std::vector<int>> subs_of_;    // alive subsegments per input segment
    std::vector<int> mark_;
    int mark_stamp_ = 0;
    int super_[3] = {-1, -1, -1};
    int last_tri_ = 0;
    std::uint64_t lcg_ = 0x2545F4914F6CDD1DULL;
    double scale_ = 1.0;

    std::deque<int> subq_;
    std::deque<int> badq_;

    // --- basic helpers -------------------------------------------------
    int next_random(int n) {
        lcg_ = lcg_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<int>((lcg_ >> 33) % static_cast<std::uint64_t>(n));
    }
    int alloc_tri() {
        if (!free_.empty()) {
            int t = free_.back();
            free_.pop_back();
            return t;
        }
        tris_.emplace_back();
        mark_.push_back(0);
        return static_cast<int>(tris_.size()) - 1;
    }
    int new_stamp() { return ++mark_stamp_; }
    int edge_of(const Tri& t, int a, int b) const {
        for (int i = 0; i < 3; ++i) {
            int p = t.v[nxt(i)], q = t.v[prv(i)];
            if ((p == a && q == b) || (p == b && q == a)) return i;
        }
        return -1;
    }
    int vertex_slot(const Tri& t, int a) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == a) return i;
        return -1;
    }
    double h_at(Vec2 p) const { return size_(p); }

    std::vector<int> replace(const std::vector<int>& dead, const std::vector<NewTri>& fresh,
                             const std::vector<std::array<int, 3>>& seg_edges);
    std::vector<CavityEdge> cavity_boundary(const std::vector<int>& dead, int stamp) const;
    std::pair<int, int> find_edge(int a, int b) const;
    int locate(Vec2 p, int start);
    void build_delaunay();
    int insert_vertex(Vec2 p, int containing, int split_sub, const std::array<int, 2>& new_subs, bool input,
                      std::vector<int>* created);
    bool flip(int t, int i, std::vector<int>* created);
    void legalize(std::vector<std::pair<int, int>> edges);
    void recover_segment(int s);
    void classify();
    void refine();

    // refinement helpers
    bool encroaches(int s, Vec2 p) const {
        Vec2 a = pts_[subs_[s].a], b = pts_[subs_[s].b];
        return dot(a - p, b - p) < 0.0;
    }
    double sub_length(int s) const { return dist(pts_[subs_[s].a], pts_[subs_[s].b]); }
    bool sub_needs_split(int s);
    bool can_split(int s, bool for_size) const;
    double split_parameter(int s) const;
    bool split_sub(int s);
    int split_sub_at(int s, double t, Vec2 p, std::vector<int>* created);
    bool is_bad(int t, bool& size_bad) const;
    int walk_to(int t, Vec2 to, int& blocking) const;
    std::vector<int> cavity_of(Vec2 p, const std::vector<int>& seeds, int split_sub, int stamp);
    void after_insert(int v, const std::vector<int>& created);
    void check_budget() const {
        if (pts_.size() > params_.max_vertices)
            fail(ErrorKind::MeshFailure, "vertex budget exceeded during refinement (" +
                                             std::to_string(params_.max_vertices) + ")");
    }
};

std::vector<CavityEdge> Triangulator::cavity_boundary(const std::vector<int>& dead, int stamp) const {
    std::vector<CavityEdge> out;
    for (int t : dead) {
        const Tri& T = tris_[t];
        for (int i = 0; i < 3; ++i) {
            int n = T.nb[i];
            if (n >= 0 && mark_[n] == stamp) continue;
            out.push_back({T.v[nxt(i)], T.v[prv(i)], n, T.seg[i], t});
        }
    }
    return out;
}

std::vector<int> Triangulator::replace(const std::vector<int>& dead, const std::vector<NewTri>& fresh,
                                       const std::vector<std::array<int, 3>>& seg_edges) {
    int stamp = new_stamp();
    for (int t : dead) mark_[t] = stamp;
    std::vector<CavityEdge> boundary = cavity_boundary(dead, stamp);
    for (int t : dead) {
        tris_[t].alive = false;
        free_.push_back(t);
    }
    // Reuse slots in a deterministic order.
    std::sort(free_.begin(), free_.end(), std::greater<int>());
    std::vector<int> ids;
    ids.reserve(fresh.size());
    for (const auto& f : fresh) {
        int t = alloc_tri();
        Tri& T = tris_[t];
        T.v = {f.a, f.b, f.c};
        T.nb = {-1, -1, -1};
        T.seg = {-1, -1, -1};
        T.region = f.region;
        T.alive = true;
        mark_[t] = 0;
        ids.push_back(t);
        for (int k = 0; k < 3; ++k) vert_tri_[T.v[k]] = t;
    }
    std::vector<char> used(boundary.size(), 0);
    for (std::size_t x = 0; x < ids.size(); ++x) {
        Tri& T = tris_[ids[x]];
        for (int i = 0; i < 3; ++i) {
            if (T.nb[i] >= 0) continue;
            int u = T.v[nxt(i)], w = T.v[prv(i)];
            bool linked = false;
            // Twin among the new triangles.
            for (std::size_t y = 0; y < ids.size() && !linked; ++y) {
                if (y == x) continue;
                Tri& S = tris_[ids[y]];
                for (int j = 0; j < 3; ++j) {
                    if (S.v[nxt(j)] == w && S.v[prv(j)] == u) {
                        T.nb[i] = ids[y];
                        S.nb[j] = ids[x];
                        linked = true;
                        break;
                    }
                }
            }
            if (linked) continue;
            for (std::size_t k = 0; k < boundary.size(); ++k) {
                if (used[k] || boundary[k].u != u || boundary[k].w != w) continue;
                used[k] = 1;
                T.nb[i] = boundary[k].outside;
                T.seg[i] = boundary[k].seg;
                if (boundary[k].outside >= 0) {
                    Tri& O = tris_[boundary[k].outside];
                    int j = edge_of(O, u, w);
                    O.nb[j] = ids[x];
                }
                linked = true;
                break;
            }
            if (linked) continue;
            bool listed = false;
            for (const auto& e : seg_edges)
                if ((e[0] == u && e[1] == w) || (e[0] == w && e[1] == u)) listed = true;
            if (!listed) fail(ErrorKind::MeshFailure, "cavity retriangulation does not close");
        }
    }
    for (const auto& e : seg_edges) {
        for (int t : ids) {
            Tri& T = tris_[t];
            int i = edge_of(T, e[0], e[1]);
            if (i >= 0) T.seg[i] = e[2];
        }
    }
    for (std::size_t k = 0; k < boundary.size(); ++k) {
        // Only the subsegment being split may disappear from the cavity boundary.
        if (!used[k] && (seg_edges.empty() || boundary[k].seg < 0))
            fail(ErrorKind::MeshFailure, "cavity boundary edge left unmatched");
    }
    last_tri_ = ids.empty() ? last_tri_ : ids.front();
    return ids;
}

std::pair<int, int> Triangulator::find_edge(int a, int b) const {
    int start = vert_tri_[a];
    if (start < 0 || !tris_[start].alive || vertex_slot(tris_[start], a) < 0) return {-1, -1};
    // Rotate around a in both directions.
    int t = start;
    for (int guard = 0; guard < 1 << 20; ++guard) {
        const Tri& T = tris_[t];
        int i = edge_of(T, a, b);
        if (i >= 0) return {t, i};
        int s = vertex_slot(T, a);
        int n = T.nb[nxt(s)];  // across edge (v[s+2], v[s])
        if (n < 0 || n == start) break;
        t = n;
    }
    t = start;
    for (int guard = 0; guard < 1 << 20; ++guard) {
        const Tri& T = tris_[t];
        int i = edge_of(T, a, b);
        if (i >= 0) return {t, i};
        int s = vertex_slot(T, a);
        int n = T.nb[prv(s)];  // across edge (v[s], v[s+1])
        if (n < 0 || n == start) break;
        t = n;
    }
    return {-1, -1};
}

int Triangulator::locate(Vec2 p, int start) {
    int t = start;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
        t = -1;
        for (std::size_t k = 0; k < tris_.size(); ++k)
            if (tris_[k].alive) {
                t = static_cast<int>(k);
                break;
            }
    }
    std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit && t >= 0; ++step) {
        const Tri& T = tris_[t];
        int off = next_random(3);
        int exit_edge = -1;
        for (int k = 0; k < 3; ++k) {
            int i = (k + off) % 3;
            if (orient2d(pts_[T.v[nxt(i)]], pts_[T.v[prv(i)]], p) < 0) {
                exit_edge = i;
                break;
            }
        }
        if (exit_edge < 0) return t;
        t = T.nb[exit_edge];
    }
    // Fall back to a scan.
    for (std::size_t k = 0; k < tris_.size(); ++k) {
        const Tri& T = tris_[k];
        if (!T.alive) continue;
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i)
            if (orient2d(pts_[T.v[nxt(i)]], pts_[T.v[prv(i)]], p) < 0) inside = false;
        if (inside) return static_cast<int>(k);
    }
    return -1;
}

std::vector<int> Triangulator::cavity_of(Vec2 p, const std::vector<int>& seeds, int split_sub, int stamp) {
    std::vector<int> cav;
    auto& mark = mark_;
    for (int s : seeds) {
        if (mark[s] != stamp) {
            mark[s] = stamp;
            cav.push_back(s);
        }
    }
    for (std::size_t k = 0; k < cav.size(); ++k) {
        const Tri& T = tris_[cav[k]];
        for (int i = 0; i < 3; ++i) {
            int n = T.nb[i];
            if (n < 0 || mark[n] == stamp) continue;
            if (T.seg[i] >= 0 && T.seg[i] != split_sub) continue;
            const Tri& N = tris_[n];
            if (incircle(pts_[N.v[0]], pts_[N.v[1]], pts_[N.v[2]], p) > 0) {
                mark[n] = stamp;
                cav.push_back(n);
            }
        }
    }
    return cav;
}

int Triangulator::insert_vertex(Vec2 p, int containing, int split_sub, const std::array<int, 2>& new_subs,
                                bool input, std::vector<int>* created) {
    std::vector<int> seeds;
    if (split_sub >= 0) {
        auto [t, i] = find_edge(subs_[split_sub].a, subs_[split_sub].b);
        if (t < 0) fail(ErrorKind::MeshFailure, "subsegment missing from the triangulation");
        seeds.push_back(t);
        int n = tris_[t].nb[i];
        if (n >= 0) seeds.push_back(n);
    } else {
        seeds.push_back(containing);
    }
    int stamp = new_stamp();
    std::vector<int> cav = cavity_of(p, seeds, split_sub, stamp);
    // Shrink the cavity until p sees every boundary edge.
    for (int round = 0; round < 1000; ++round) {
        std::vector<CavityEdge> bnd = cavity_boundary(cav, stamp);
        int bad_owner = -1;
        for (const auto& e : bnd) {
            if (split_sub >= 0 && e.seg == split_sub) continue;
            if (orient2d(pts_[e.u], pts_[e.w], p) <= 0) {
                bad_owner = e.owner;
                break;
            }
        }
        if (bad_owner < 0) break;
        if (std::find(seeds.begin(), seeds.end(), bad_owner) != seeds.end())
            fail(ErrorKind::MeshFailure, "point insertion found a non-star-shaped cavity");
        mark_[bad_owner] = 0;
        cav.erase(std::find(cav.begin(), cav.end(), bad_owner));
        stamp = new_stamp();
        for (int t : cav) mark_[t] = stamp;
    }
    int v = static_cast<int>(pts_.size());
    pts_.push_back(p);
    is_input_.push_back(input ? 1 : 0);
    vert_tri_.push_back(-1);
    std::vector<CavityEdge> bnd = cavity_boundary(cav, stamp);
    std::vector<NewTri> fresh;
    for (const auto& e : bnd) {
        if (split_sub >= 0 && e.seg == split_sub) continue;
        fresh.push_back({v, e.u, e.w, tris_[e.owner].region});
    }
    std::vector<std::array<int, 3>> seg_edges;
    if (split_sub >= 0) {
        seg_edges.push_back({subs_[split_sub].a, v, new_subs[0]});
        seg_edges.push_back({v, subs_[split_sub].b, new_subs[1]});
    }
    std::vector<int> ids = replace(cav, fresh, seg_edges);
    if (created) created->insert(created->end(), ids.begin(), ids.end());
    return v;
}

bool Triangulator::flip(int t, int i, std::vector<int>* created) {
    Tri T = tris_[t];
    int n = T.nb[i];
    if (n < 0 || T.seg[i] >= 0) return false;
    const Tri& N = tris_[n];
    int a = T.v[i], b = T.v[nxt(i)], c = T.v[prv(i)];
    int j = edge_of(N, b, c);
    int d = N.v[j];
    if (!segments_cross(pts_[a], pts_[d], pts_[b], pts_[c])) return false;
    std::vector<NewTri> fresh = {{a, b, d, T.region}, {a, d, c, T.region}};
    std::vector<int> ids = replace({t, n}, fresh, {});
    if (created) created->insert(created->end(), ids.begin(), ids.end());
    return true;
}

void Triangulator::legalize(std::vector<std::pair<int, int>> edges) {
    std::size_t guard = 0;
    while (!edges.empty()) {
        if (++guard > 50'000'000) fail(ErrorKind::MeshFailure, "edge legalization does not terminate");
        auto [a, b] = edges.back();
        edges.pop_back();
        auto [t, i] = find_edge(a, b);
        if (t < 0) continue;
        const Tri& T = tris_[t];
        if (T.seg[i] >= 0 || T.nb[i] < 0) continue;
        const Tri& N = tris_[T.nb[i]];
        int j = edge_of(N, a, b);
        Vec2 q = pts_[N.v[j]];
        if (incircle(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], q) <= 0) continue;
        int p = T.v[i], r = N.v[j];
        std::vector<int> created;
        if (!flip(t, i, &created)) continue;
        // The four outer edges of the new quadrilateral.
        edges.push_back({p, a});
        edges.push_back({a, r});
        edges.push_back({r, b});
        edges.push_back({b, p});
    }
}

void Triangulator::build_delaunay() {
    const auto& P = in_.points;
    double xmin = P[0].x, xmax = P[0].x, ymin = P[0].y, ymax = P[0].y;
    for (const auto& p : P) {
        xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
    double m = std::max(xmax - xmin, ymax - ymin);
    if (!(m > 0.0)) fail(ErrorKind::InvalidPolygon, "input points are degenerate");
    scale_ = m;
    double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    pts_ = {{cx - 40 * m, cy - 30 * m}, {cx + 40 * m, cy - 30 * m}, {cx, cy + 40 * m}};
    is_input_ = {0, 0, 0};
    vert_tri_ = {0, 0, 0};
    super_[0] = 0, super_[1] = 1, super_[2] = 2;
    int t0 = alloc_tri();
    tris_[t0].v = {0, 1, 2};
    tris_[t0].alive = true;
    last_tri_ = t0;

    // Merge exactly coincident input points.
    std::map<std::pair<double, double>, int> seen;
    std::vector<int> remap(P.size());
    for (std::size_t k = 0; k < P.size(); ++k) {
        auto key = std::make_pair(P[k].x, P[k].y);
        auto it = seen.find(key);
        if (it != seen.end()) {
            remap[k] = it->second;
            continue;
        }
        int t = locate(P[k], last_tri_);
        if (t < 0) fail(ErrorKind::MeshFailure, "point location failed during insertion");
        int v = insert_vertex(P[k], t, -1, {-1, -1}, true, nullptr);
        seen.emplace(key, v);
        remap[k] = v;
    }
    segs_ = in_.segments;
    for (auto& s : segs_) {
        if (s.a < 0 || s.b < 0 || s.a >= static_cast<int>(P.size()) || s.b >= static_cast<int>(P.size()))
            fail(ErrorKind::InvalidPolygon, "segment refers to a missing point");
        s.a = remap[s.a];
        s.b = remap[s.b];
        if (s.a == s.b) fail(ErrorKind::InvalidPolygon, "segment of zero length");
    }
    subs_of_.assign(segs_.size(), {});
}

void Triangulator::recover_segment(int s) {
    int a = segs_[s].a, b = segs_[s].b;
    int sid = static_cast<int>(subs_.size());
    subs_.push_back({a, b, s, 0.0, 1.0, true});
    subs_of_[s].push_back(sid);
    Vec2 A = pts_[a], B = pts_[b];
    auto mark_edge = [&]() {
        auto [t, i] = find_edge(a, b);
        if (t < 0) return false;
        if (tris_[t].seg[i] >= 0) fail(ErrorKind::InvalidPolygon, "duplicate segment in input");
        tris_[t].seg[i] = sid;
        int n = tris_[t].nb[i];
        if (n >= 0) tris_[n].seg[edge_of(tris_[n], a, b)] = sid;
        return true;
    };
    if (mark_edge()) return;

    // Collect the edges crossed by segment ab, walking from a.
    std::vector<std::pair<int, int>> crossing;
    {
        int start = vert_tri_[a];
        int t = start;
        int found = -1;
        // Rotate around a to find the triangle whose angle at a contains direction ab.
        for (int guard = 0; guard < 100000; ++guard) {
            const Tri& T = tris_[t];
            int sa = vertex_slot(T, a);
            int u = T.v[nxt(sa)], w = T.v[prv(sa)];
            int ou = orient2d(A, B, pts_[u]);
            int ow = orient2d(A, B, pts_[w]);
            if (ou == 0 && dot(pts_[u] - A, B - A) > 0)
                fail(ErrorKind::InvalidPolygon, "a vertex lies in the interior of a segment");
            if (ow == 0 && dot(pts_[w] - A, B - A) > 0)
                fail(ErrorKind::InvalidPolygon, "a vertex lies in the interior of a segment");
            if (ou < 0 && ow > 0) {
                found = t;
                break;
            }
            int n = T.nb[nxt(sa)];
            if (n < 0) fail(ErrorKind::InvalidPolygon, "segment leaves the triangulated hull");
            t = n;
            if (t == start) break;
        }
        if (found < 0) fail(ErrorKind::MeshFailure, "segment recovery could not start");
        t = found;
        int sa = vertex_slot(tris_[t], a);
        int u = tris_[t].v[nxt(sa)], w = tris_[t].v[prv(sa)];
        for (int guard = 0; guard < 10'000'000; ++guard) {
            const Tri& T = tris_[t];
            int i = edge_of(T, u, w);
            if (T.seg[i] >= 0) fail(ErrorKind::InvalidPolygon, "input segments cross");
            crossing.push_back({u, w});
            int n = T.nb[i];
            if (n < 0) fail(ErrorKind::InvalidPolygon, "segment leaves the triangulated hull");
            const Tri& N = tris_[n];
            int x = N.v[edge_of(N, u, w)];
            if (x == b) break;
            int ox = orient2d(A, B, pts_[x]);
            if (ox == 0) fail(ErrorKind::InvalidPolygon, "a vertex lies in the interior of a segment");
            // u is right of ab (orient < 0), w is left.
            if (ox < 0) u = x;
            else w = x;
            t = n;
        }
    }
    std::deque<std::pair<int, int>> queue(crossing.begin(), crossing.end());
    std::vector<std::pair<int, int>> fresh_edges;
    std::size_t stall = 0;
    while (!queue.empty()) {
        auto [u, w] = queue.front();
        queue.pop_front();
        auto [t, i] = find_edge(u, w);
        if (t < 0) fail(ErrorKind::MeshFailure, "lost a crossing edge during segment recovery");
        const Tri& T = tris_[t];
        int p = T.v[i];
        const Tri& N = tris_[T.nb[i]];
        int q = N.v[edge_of(N, u, w)];
        if (!segments_cross(pts_[p], pts_[q], pts_[u], pts_[w])) {
            queue.push_back({u, w});
            if (++stall > 4 * queue.size() + 1000)
                fail(ErrorKind::MeshFailure, "segment recovery stalled");
            continue;
        }
        stall = 0;
        flip(t, i, nullptr);
        bool crosses = p != a && p != b && q != a && q != b && segments_cross(A, B, pts_[p], pts_[q]);
        if (crosses) queue.push_back({p, q});
        else fresh_edges.push_back({p, q});
    }
    if (!mark_edge()) fail(ErrorKind::MeshFailure, "segment recovery failed");
    std::vector<std::pair<int, int>> todo;
    for (auto e : fresh_edges)
        if (!((e.first == a && e.second == b) || (e.first == b && e.second == a))) todo.push_back(e);
    legalize(todo);
}

void Triangulator::classify() {
    // Locate seeds before removing anything.
    auto locate_seed = [&](Vec2 p) {
        int t = locate(p, last_tri_);
        if (t < 0) fail(ErrorKind::InvalidPolygon, "region or hole seed outside the triangulation");
        return t;
    };
    std::vector<int> hole_tris, region_tris;
    for (const auto& h : in_.holes) hole_tris.push_back(locate_seed(h));
    for (const auto& r : in_.regions) region_tris.push_back(locate_seed(r.seed));

    std::vector<char> dead(tris_.size(), 0);
    auto flood = [&](std::vector<int> stack, std::vector<char>& flag) {
        for (int t : stack) flag[t] = 1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int i = 0; i < 3; ++i) {
                int n = tris_[t].nb[i];
                if (n < 0 || flag[n] || tris_[t].seg[i] >= 0) continue;
                flag[n] = 1;
                stack.push_back(n);
            }
        }
    };
    std::vector<int> outer;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        if (!tris_[t].alive) continue;
        for (int k = 0; k < 3; ++k)
            if (tris_[t].v[k] < 3) {
                outer.push_back(static_cast<int>(t));
                break;
            }
    }
    flood(outer, dead);
    flood(hole_tris, dead);
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        if (!tris_[t].alive) dead[t] = 0;
        tris_[t].region = 0;
    }
    for (std::size_t r = 0; r < in_.regions.size(); ++r) {
        std::vector<char> flag(tris_.size(), 0);
        if (dead[region_tris[r]]) fail(ErrorKind::InvalidPolygon, "region seed lies in a hole or outside");
        flood({region_tris[r]}, flag);
        for (std::size_t t = 0; t < tris_.size(); ++t)
            if (flag[t] && tris_[t].alive) tris_[t].region = in_.regions[r].tag;
    }
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        if (!dead[t]) continue;
        Tri& T = tris_[t];
        for (int i = 0; i < 3; ++i) {
            int n = T.nb[i];
            if (n >= 0 && !dead[n]) {
                Tri& N = tris_[n];
                for (int j = 0; j < 3; ++j)
                    if (N.nb[j] == static_cast<int>(t)) N.nb[j] = -1;
            }
        }
        T.alive = false;
        free_.push_back(static_cast<int>(t));
    }
    std::sort(free_.begin(), free_.end(), std::greater<int>());
    std::fill(vert_tri_.begin(), vert_tri_.end(), -1);
    bool any = false;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        const Tri& T = tris_[t];
        if (!T.alive) continue;
        any = true;
        last_tri_ = static_cast<int>(t);
        for (int i = 0; i < 3; ++i) {
            vert_tri_[T.v[i]] = static_cast<int>(t);
            if (T.nb[i] < 0 && T.seg[i] < 0) fail(ErrorKind::InvalidPolygon, "domain boundary is not closed");
        }
    }
    if (!any) fail(ErrorKind::InvalidPolygon, "the domain is empty");
}

// ---------------------------------------------------------------- refinement

double Triangulator::split_parameter(int s) const {
    const Sub& S = subs_[s];
    const auto& seg = segs_[S.input];
    double len = dist(pts_[seg.a], pts_[seg.b]);
    double ls = (S.tb - S.ta) * len;
    bool ain = is_input_[S.a] != 0, bin = is_input_[S.b] != 0;
    if (ain != bin && ls > 0.0) {
        // Concentric shells: split at a power-of-two distance from the input vertex.
        double target = std::exp2(std::round(std::log2(0.5 * ls)));
        while (target > ls * (2.0 / 3.0)) target *= 0.5;
        while (target < ls / 3.0) target *= 2.0;
        return ain ? S.ta + target / len : S.tb - target / len;
    }
    return 0.5 * (S.ta + S.tb);
}

bool Triangulator::can_split(int s, bool for_size) const {
    const Sub& S = subs_[s];
    double len = sub_length(s);
    if (!(len > 1e-13 * scale_)) return false;
    if (for_size) return true;
    Vec2 mid = 0.5 * (pts_[S.a] + pts_[S.b]);
    return len >= params_.fuse * h_at(mid);
}

int Triangulator::split_sub_at(int s, double t, Vec2 p, std::vector<int>* created) {
    Sub S = subs_[s];
    Vec2 A = pts_[S.a], B = pts_[S.b];
    // The split point must fall strictly between the endpoints.
    if ((p == A) || (p == B) || dot(p - A, B - A) <= 0.0 || dot(p - B, A - B) <= 0.0) return -1;
    int s1 = static_cast<int>(subs_.size());
    subs_.push_back({S.a, -1, S.input, S.ta, t, true});
    int s2 = static_cast<int>(subs_.size());
    subs_.push_back({-1, S.b, S.input, t, S.tb, true});
    int v = insert_vertex(p, -1, s, {s1, s2}, false, created);
    subs_[s1].b = v;
    subs_[s2].a = v;
    subs_[s].alive = false;
    auto& list = subs_of_[S.input];
    list.erase(std::remove(list.begin(), list.end(), s), list.end());
    list.push_back(s1);
    list.push_back(s2);
    return v;
}

bool Triangulator::split_sub(int s) {
    check_budget();
    const Sub S = subs_[s];
    const auto& seg = segs_[S.input];
    double t = split_parameter(s);
    Vec2 A = pts_[seg.a], B = pts_[seg.b];
    Vec2 p = A + t * (B - A);
    std::vector<int> created;
    int v = split_sub_at(s, t, p, &created);
    if (v < 0) return false;
    after_insert(v, created);
    if (seg.link >= 0) {
        const auto& lk = segs_[seg.link];
        double tl = seg.link_reversed ? 1.0 - t : t;
        Vec2 shift = pts_[lk.a] - (seg.link_reversed ? B : A);
        Vec2 q = p + shift;
        for (int o : subs_of_[seg.link]) {
            const Sub& O = subs_[o];
            double lo = std::min(O.ta, O.tb), hi = std::max(O.ta, O.tb);
            if (tl > lo && tl < hi) {
                std::vector<int> created2;
                int w = split_sub_at(o, tl, q, &created2);
                if (w < 0) fail(ErrorKind::MeshFailure, "linked segment could not be split consistently");
                after_insert(w, created2);
                break;
            }
        }
    }
    return true;
}

void Triangulator::after_insert(int v, const std::vector<int>& created) {
    for (int t : created) {
        if (!tris_[t].alive) continue;
        badq_.push_back(t);
        const Tri& T = tris_[t];
        for (int i = 0; i < 3; ++i) {
            int s = T.seg[i];
            if (s < 0) continue;
            if (T.v[i] == v || subs_[s].a == v || subs_[s].b == v) subq_.push_back(s);
        }
    }
}

bool Triangulator::sub_needs_split(int s) {
    const Sub& S = subs_[s];
    Vec2 A = pts_[S.a], B = pts_[S.b];
    double len = dist(A, B);
    if (len > h_at(0.5 * (A + B)) && can_split(s, true)) return true;
    auto [t, i] = find_edge(S.a, S.b);
    if (t < 0) return false;
    int sides[2] = {t, tris_[t].nb[i]};
    for (int k = 0; k < 2; ++k) {
        int u = sides[k];
        if (u < 0) continue;
        const Tri& U = tris_[u];
        int j = edge_of(U, S.a, S.b);
        if (encroaches(s, pts_[U.v[j]])) return can_split(s, false);
    }
    return false;
}

bool Triangulator::is_bad(int t, bool& size_bad) const {
    const Tri& T = tris_[t];
    Vec2 a = pts_[T.v[0]], b = pts_[T.v[1]], c = pts_[T.v[2]];
    double la = dot(b - c, b - c), lb = dot(c - a, c - a), lc = dot(a - b, a - b);
    double area = 0.5 * std::abs(cross(b - a, c - a));
    if (!(area > 0.0)) return false;
    double r2 = la * lb * lc / (16.0 * area * area);
    Vec2 cen = (1.0 / 3.0) * (a + b + c);
    double h = h_at(cen);
    size_bad = 3.0 * r2 > h * h;
    double cap = params_.max_area;
    if (cap > 0.0 && area > cap) size_bad = true;
    for (const auto& r : in_.regions)
        if (r.tag == T.region && r.max_area > 0.0 && area > r.max_area) size_bad = true;
    if (size_bad) return true;
    double lmin2 = std::min({la, lb, lc});
    double sn = std::sin(params_.min_angle_deg * M_PI / 180.0);
    if (r2 * 4.0 * sn * sn <= lmin2) return false;
    // Shape-bad: skip when tiny compared with the local size.
    if (std::sqrt(lmin2) < params_.fuse * h) return false;
    // Skip when the smallest angle sits between two constrained edges.
    int smallest = 0;
    double ls[3] = {la, lb, lc};
    for (int i = 1; i < 3; ++i)
        if (ls[i] < ls[smallest]) smallest = i;
    // The smallest angle is at vertex `smallest`; its incident edges are nxt and prv.
    if (T.seg[nxt(smallest)] >= 0 && T.seg[prv(smallest)] >= 0) return false;
    return true;
}

int Triangulator::walk_to(int t, Vec2 to, int& blocking) const {
    blocking = -1;
    const Tri& T0 = tris_[t];
    Vec2 from = (1.0 / 3.0) * (pts_[T0.v[0]] + pts_[T0.v[1]] + pts_[T0.v[2]]);
    int prev = -1;
    for (std::size_t step = 0; step < tris_.size() + 8; ++step) {
        const Tri& T = tris_[t];
        int exit_edge = -1;
        for (int i = 0; i < 3; ++i) {
            Vec2 u = pts_[T.v[nxt(i)]], w = pts_[T.v[prv(i)]];
            if (orient2d(u, w, to) >= 0) continue;
            if (T.nb[i] == prev && prev >= 0) continue;
            int o1 = orient2d(from, to, u), o2 = orient2d(from, to, w);
            if (o1 * o2 <= 0) {
                exit_edge = i;
                break;
            }
        }
        if (exit_edge < 0) {
            bool inside = true;
            for (int i = 0; i < 3; ++i)
                if (orient2d(pts_[T.v[nxt(i)]], pts_[T.v[prv(i)]], to) < 0) inside = false;
            if (inside) return t;
            for (int i = 0; i < 3; ++i)
                if (orient2d(pts_[T.v[nxt(i)]], pts_[T.v[prv(i)]], to) < 0) exit_edge = i;
        }
        if (T.seg[exit_edge] >= 0) {
            blocking = T.seg[exit_edge];
            return -1;
        }
        prev = t;
        t = T.nb[exit_edge];
        if (t < 0) return -1;
    }
    return -1;
}

void Triangulator::refine() {
    for (std::size_t s = 0; s < subs_.size(); ++s)
        if (subs_[s].alive) subq_.push_back(static_cast<int>(s));
    auto drain_subs = [&]() {
        while (!subq_.empty()) {
            int s = subq_.front();
            subq_.pop_front();
            if (!subs_[s].alive) continue;
            if (sub_needs_split(s)) split_sub(s);
        }
    };
    drain_subs();
    for (std::size_t t = 0; t < tris_.size(); ++t)
        if (tris_[t].alive) badq_.push_back(static_cast<int>(t));
    while (!badq_.empty()) {
        drain_subs();
        if (badq_.empty()) break;
        int t = badq_.front();
        badq_.pop_front();
        if (!tris_[t].alive) continue;
        bool size_bad = false;
        if (!is_bad(t, size_bad)) continue;
        check_budget();
        const Tri T = tris_[t];
        Vec2 c = circumcenter(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]);
        int blocking = -1;
        int host = walk_to(t, c, blocking);
        if (host < 0) {
            if (blocking >= 0 && can_split(blocking, size_bad) && split_sub(blocking)) badq_.push_back(t);
            continue;
        }
        int stamp = new_stamp();
        std::vector<int> cav = cavity_of(c, {host}, -1, stamp);
        std::vector<CavityEdge> bnd = cavity_boundary(cav, stamp);
        std::vector<int> encroached;
        for (const auto& e : bnd)
            if (e.seg >= 0 && encroaches(e.seg, c)) encroached.push_back(e.seg);
        if (!encroached.empty()) {
            bool any = false;
            for (int s : encroached) {
                if (subs_[s].alive && can_split(s, size_bad) && split_sub(s)) any = true;
            }
            if (any) badq_.push_back(t);
            continue;
        }
        std::vector<int> created;
        int v = insert_vertex(c, host, -1, {-1, -1}, false, &created);
        after_insert(v, created);
    }
}

Mesh Triangulator::run() {
    if (in_.points.size() < 3) fail(ErrorKind::InvalidPolygon, "fewer than three input points");
    build_delaunay();
    for (std::size_t s = 0; s < segs_.size(); ++s) recover_segment(static_cast<int>(s));
    for (const auto& s : segs_) {
        if (s.link >= 0) {
            if (s.link >= static_cast<int>(segs_.size())) fail(ErrorKind::InvalidPolygon, "bad segment link");
            double l1 = dist(pts_[s.a], pts_[s.b]);
            const auto& o = segs_[s.link];
            double l2 = dist(pts_[o.a], pts_[o.b]);
            if (std::abs(l1 - l2) > 1e-12 * std::max(l1, l2))
                fail(ErrorKind::InvalidPolygon, "linked segments differ in length");
        }
    }
    classify();
    refine();

    Mesh mesh;
    std::vector<int> node_map(pts_.size(), -1);
    for (const auto& T : tris_) {
        if (!T.alive) continue;
        for (int k = 0; k < 3; ++k) node_map[T.v[k]] = 0;
    }
    for (std::size_t v = 0; v < pts_.size(); ++v) {
        if (node_map[v] < 0) continue;
        node_map[v] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(pts_[v]);
    }
    for (const auto& T : tris_) {
        if (!T.alive) continue;
        std::array<int, 3> tri{node_map[T.v[0]], node_map[T.v[1]], node_map[T.v[2]]};
        if (orient2d(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]]) <= 0)
            fail(ErrorKind::MeshFailure, "non-positive triangle in the output");
        mesh.tris.push_back(tri);
        mesh.region.push_back(T.region);
    }
    for (const auto& S : subs_) {
        if (!S.alive) continue;
        if (node_map[S.a] < 0 || node_map[S.b] < 0) continue;
        mesh.edges.push_back({node_map[S.a], node_map[S.b], segs_[S.input].marker});
    }
    return mesh;
}

}  // namespace

Mesh triangulate(const Pslg& pslg, const SizeField& size, const MeshParams& params) {
    if (!(params.h > 0.0)) fail(ErrorKind::InvalidPolygon, "mesh size h must be positive");
    Triangulator tr(pslg, size, params);
    return tr.run();
}

Mesh triangulate(const Pslg& pslg, const MeshParams& params) {
    SizeField f = [h = params.h](Vec2) { return h; };
    return triangulate(pslg, f, params);
}

SizeField graded_size(const MeshParams& params, std::vector<std::pair<Vec2, Vec2>> features) {
    if (!(params.h_neck > 0.0) || features.empty()) return [h = params.h](Vec2) { return h; };
    if (params.h_neck > params.h || !(params.grading > 0.0))
        fail(ErrorKind::MeshFailure, "mesh parameters need 0 < h_neck <= h and grading > 0");
    // Sort features by the left end of their x-extent for pruning.
    std::sort(features.begin(), features.end(), [](const auto& a, const auto& b) {
        return std::min(a.first.x, a.second.x) < std::min(b.first.x, b.second.x);
    });
    std::vector<double> lo, hi;
    for (const auto& f : features) {
        lo.push_back(std::min(f.first.x, f.second.x));
        hi.push_back(std::max(f.first.x, f.second.x));
    }
    double h = params.h, h0 = params.h_neck, g = params.grading;
    return [features = std::move(features), lo = std::move(lo), hi = std::move(hi), h, h0, g](Vec2 p) {
        double reach = (h - h0) / g;  // beyond this distance the bulk size applies
        double best = reach;
        for (std::size_t k = 0; k < features.size(); ++k) {
            if (lo[k] > p.x + best) break;
            if (hi[k] < p.x - best) continue;
            best = std::min(best, point_segment_distance(p, features[k].first, features[k].second));
        }
        return std::min(h, h0 + g * best);
    };
}

}  // namespace sieve

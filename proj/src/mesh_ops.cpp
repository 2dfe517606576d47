#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <unordered_map>

#include "sieve/error.hpp"
#include "sieve/mesh.hpp"
#include "sieve/predicates.hpp"

namespace sieve {

namespace {

using EdgeKey = std::pair<int, int>;
EdgeKey key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const noexcept {
        return std::hash<long long>()((static_cast<long long>(k.first) << 32) ^ static_cast<unsigned>(k.second));
    }
};

}  // namespace

double Mesh::triangle_area(std::size_t t) const {
    const auto& T = tris[t];
    return signed_area(nodes[T[0]], nodes[T[1]], nodes[T[2]]);
}

double Mesh::area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) a += triangle_area(t);
    return a;
}

double Mesh::region_area(const std::function<bool(int)>& pred) const {
    double a = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t)
        if (pred(region[t])) a += triangle_area(t);
    return a;
}

std::vector<int> Mesh::marked_nodes(const std::function<bool(int)>& pred) const {
    std::vector<int> out;
    for (const auto& e : edges) {
        if (!pred(e.marker)) continue;
        out.push_back(e.a);
        out.push_back(e.b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> Mesh::marked_nodes(int marker) const {
    return marked_nodes([marker](int m) { return m == marker; });
}

std::vector<int> Mesh::marked_nodes(EdgeKind kind) const {
    return marked_nodes([kind](int m) { return edge_kind(m) == kind; });
}

std::vector<MeshEdge> Mesh::edges_of(EdgeKind kind) const {
    std::vector<MeshEdge> out;
    for (const auto& e : edges)
        if (edge_kind(e.marker) == kind) out.push_back(e);
    return out;
}

void Mesh::check() const {
    if (region.size() != tris.size()) fail(ErrorKind::MeshFailure, "region list does not match triangles");
    std::unordered_map<EdgeKey, int, EdgeKeyHash> count;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& T = tris[t];
        for (int k = 0; k < 3; ++k)
            if (T[k] < 0 || T[k] >= static_cast<int>(nodes.size()))
                fail(ErrorKind::MeshFailure, "triangle refers to a missing node");
        if (orient2d(nodes[T[0]], nodes[T[1]], nodes[T[2]]) <= 0)
            fail(ErrorKind::MeshFailure, "triangle " + std::to_string(t) + " is not positively oriented");
        for (int k = 0; k < 3; ++k) ++count[key(T[k], T[(k + 1) % 3])];
    }
    for (const auto& [k, c] : count)
        if (c > 2) fail(ErrorKind::MeshFailure, "edge shared by more than two triangles");
    // Boundary edges (count 1) must all be marked.
    std::unordered_map<EdgeKey, int, EdgeKeyHash> marked;
    for (const auto& e : edges) {
        auto it = count.find(key(e.a, e.b));
        if (it == count.end()) fail(ErrorKind::MeshFailure, "marked edge is not a mesh edge");
        marked[key(e.a, e.b)] = e.marker;
    }
    std::set<int> paired_upper, paired_lower;
    for (const auto& [u, l] : gamma_pairs) {
        if (!paired_upper.insert(u).second || !paired_lower.insert(l).second)
            fail(ErrorKind::MeshFailure, "interface pairing is not a bijection");
        if (nodes[u] != nodes[l]) fail(ErrorKind::MeshFailure, "paired interface nodes differ in position");
    }
    for (const auto& [k, c] : count) {
        if (c == 1 && !marked.count(k)) {
            bool gamma_lower = paired_lower.count(k.first) && paired_lower.count(k.second);
            if (!gamma_lower) fail(ErrorKind::MeshFailure, "unmarked boundary edge");
        }
    }
}

// ------------------------------------------------------------------ refine

Mesh refine(const Mesh& mesh, const std::function<bool(std::size_t)>& marked) {
    std::map<EdgeKey, int> split;  // edge -> midpoint node (-1 until created)
    std::vector<char> red(mesh.tris.size(), 0);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        if (!marked(t)) continue;
        red[t] = 1;
        const auto& T = mesh.tris[t];
        for (int k = 0; k < 3; ++k) split[key(T[k], T[(k + 1) % 3])] = -1;
    }
    if (split.empty()) return mesh;
    std::unordered_map<int, std::vector<int>> partner;
    for (const auto& [a, b] : mesh.gamma_pairs) partner[a].push_back(b), partner[b].push_back(a);
    for (const auto& [a, b] : mesh.periodic_pairs) partner[a].push_back(b), partner[b].push_back(a);
    std::set<EdgeKey> all_edges;
    for (const auto& T : mesh.tris)
        for (int k = 0; k < 3; ++k) all_edges.insert(key(T[k], T[(k + 1) % 3]));
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
            const auto& T = mesh.tris[t];
            int n = 0;
            for (int k = 0; k < 3; ++k) n += split.count(key(T[k], T[(k + 1) % 3])) ? 1 : 0;
            if (n == 2) {
                for (int k = 0; k < 3; ++k) split[key(T[k], T[(k + 1) % 3])] = -1;
                changed = true;
            }
        }
        // Paired edges split together.
        std::vector<EdgeKey> extra;
        for (const auto& [e, m] : split) {
            auto pa = partner.find(e.first), pb = partner.find(e.second);
            if (pa == partner.end() || pb == partner.end()) continue;
            for (int a2 : pa->second)
                for (int b2 : pb->second) {
                    EdgeKey k2 = key(a2, b2);
                    if (all_edges.count(k2) && !split.count(k2)) extra.push_back(k2);
                }
        }
        for (const auto& e : extra) split[e] = -1, changed = true;
    }
    Mesh out;
    out.nodes = mesh.nodes;
    for (auto& [e, m] : split) {
        m = static_cast<int>(out.nodes.size());
        out.nodes.push_back(0.5 * (mesh.nodes[e.first] + mesh.nodes[e.second]));
    }
    auto mid = [&](int a, int b) {
        auto it = split.find(key(a, b));
        return it == split.end() ? -1 : it->second;
    };
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& T = mesh.tris[t];
        int a = T[0], b = T[1], c = T[2];
        int mab = mid(a, b), mbc = mid(b, c), mca = mid(c, a);
        int n = (mab >= 0) + (mbc >= 0) + (mca >= 0);
        int r = mesh.region[t];
        auto add = [&](int x, int y, int z) {
            out.tris.push_back({x, y, z});
            out.region.push_back(r);
        };
        if (n == 3) {
            add(a, mab, mca);
            add(mab, b, mbc);
            add(mca, mbc, c);
            add(mab, mbc, mca);
        } else if (n == 1) {
            if (mab >= 0) add(a, mab, c), add(mab, b, c);
            else if (mbc >= 0) add(a, b, mbc), add(a, mbc, c);
            else add(a, b, mca), add(mca, b, c);
        } else if (n == 0) {
            add(a, b, c);
        } else {
            fail(ErrorKind::MeshFailure, "refinement closure left a triangle with two split edges");
        }
    }
    for (const auto& e : mesh.edges) {
        int m = mid(e.a, e.b);
        if (m < 0) out.edges.push_back(e);
        else {
            out.edges.push_back({e.a, m, e.marker});
            out.edges.push_back({m, e.b, e.marker});
        }
    }
    auto extend_pairs = [&](const std::vector<std::pair<int, int>>& pairs) {
        std::vector<std::pair<int, int>> res = pairs;
        std::unordered_map<int, int> fwd;
        for (const auto& [a, b] : pairs) fwd[a] = b;
        for (const auto& [e, m] : split) {
            auto fa = fwd.find(e.first), fb = fwd.find(e.second);
            if (fa == fwd.end() || fb == fwd.end()) continue;
            int m2 = mid(fa->second, fb->second);
            if (m2 >= 0) res.push_back({m, m2});
        }
        return res;
    };
    out.gamma_pairs = extend_pairs(mesh.gamma_pairs);
    out.periodic_pairs = extend_pairs(mesh.periodic_pairs);
    return out;
}

Mesh refine_uniform(const Mesh& mesh) {
    return refine(mesh, [](std::size_t) { return true; });
}

// ----------------------------------------------------------------- quality

QualityReport quality(const Mesh& mesh) {
    QualityReport q;
    q.min_angle_deg = 180.0;
    q.h_min = std::numeric_limits<double>::infinity();
    std::map<int, std::size_t> bins;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& T = mesh.tris[t];
        Vec2 p[3] = {mesh.nodes[T[0]], mesh.nodes[T[1]], mesh.nodes[T[2]]};
        double lmax = 0.0;
        for (int k = 0; k < 3; ++k) {
            Vec2 u = p[(k + 1) % 3] - p[k], w = p[(k + 2) % 3] - p[k];
            double ang = std::atan2(std::abs(cross(u, w)), dot(u, w)) * 180.0 / M_PI;
            q.min_angle_deg = std::min(q.min_angle_deg, ang);
            double l = norm(u);
            lmax = std::max(lmax, l);
            q.h_min = std::min(q.h_min, l);
            q.h_max = std::max(q.h_max, l);
            bins[static_cast<int>(std::ceil(std::log2(l)))]++;
        }
        double area = std::abs(mesh.triangle_area(t));
        if (area > 0.0) q.max_aspect = std::max(q.max_aspect, lmax * lmax / (2.0 * area));
    }
    for (const auto& [b, c] : bins) q.size_histogram.push_back({std::exp2(b), c});
    if (mesh.tris.empty()) q.h_min = 0.0, q.min_angle_deg = 0.0;
    return q;
}

// ------------------------------------------------------------------ mirror

Mesh mirror_lower(const Mesh& upper, const std::function<int(int)>& region_map,
                  const std::function<int(int)>& marker_map) {
    Mesh out = upper;
    std::vector<int> image(upper.nodes.size());
    for (std::size_t v = 0; v < upper.nodes.size(); ++v) {
        Vec2 p = upper.nodes[v];
        if (p.y == 0.0) {
            image[v] = static_cast<int>(v);
        } else {
            if (p.y < 0.0) fail(ErrorKind::MeshFailure, "mirror source has nodes below the axis");
            image[v] = static_cast<int>(out.nodes.size());
            out.nodes.push_back({p.x, -p.y});
        }
    }
    for (std::size_t t = 0; t < upper.tris.size(); ++t) {
        const auto& T = upper.tris[t];
        out.tris.push_back({image[T[0]], image[T[2]], image[T[1]]});
        out.region.push_back(region_map(upper.region[t]));
    }
    for (const auto& e : upper.edges) {
        if (upper.nodes[e.a].y == 0.0 && upper.nodes[e.b].y == 0.0) continue;
        out.edges.push_back({image[e.b], image[e.a], marker_map(e.marker)});
    }
    out.periodic_pairs.clear();
    for (const auto& [l, r] : upper.periodic_pairs) {
        out.periodic_pairs.push_back({l, r});
        if (image[l] != l) out.periodic_pairs.push_back({image[l], image[r]});
    }
    return out;
}

// ------------------------------------------------------------ interface doubling

Mesh double_interface(const Mesh& mesh, int gamma_marker, const std::function<bool(int)>& is_lower) {
    Mesh out = mesh;
    std::vector<int> gnodes = mesh.marked_nodes(gamma_marker);
    if (gnodes.empty()) fail(ErrorKind::EmptyMarker, "no interface edges to double");
    std::unordered_map<int, int> copy;
    for (int v : gnodes) {
        copy[v] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(mesh.nodes[v]);
        out.gamma_pairs.push_back({v, copy[v]});
    }
    // Which side each edge belongs to, before rewiring.
    std::unordered_map<EdgeKey, std::pair<int, int>, EdgeKeyHash> sides;  // (#upper, #lower)
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        bool low = is_lower(mesh.region[t]);
        const auto& T = mesh.tris[t];
        for (int k = 0; k < 3; ++k) {
            auto& s = sides[key(T[k], T[(k + 1) % 3])];
            (low ? s.second : s.first)++;
        }
    }
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        if (!is_lower(mesh.region[t])) continue;
        for (int k = 0; k < 3; ++k) {
            auto it = copy.find(out.tris[t][k]);
            if (it != copy.end()) out.tris[t][k] = it->second;
        }
    }
    for (auto& e : out.edges) {
        if (e.marker == gamma_marker) continue;
        auto s = sides[key(e.a, e.b)];
        if (s.second > 0 && s.first == 0) {
            auto ia = copy.find(e.a), ib = copy.find(e.b);
            if (ia != copy.end()) e.a = ia->second;
            if (ib != copy.end()) e.b = ib->second;
        }
    }
    std::vector<std::pair<int, int>> per = out.periodic_pairs;
    for (const auto& [l, r] : mesh.periodic_pairs) {
        auto il = copy.find(l), ir = copy.find(r);
        if (il != copy.end() && ir != copy.end()) per.push_back({il->second, ir->second});
    }
    out.periodic_pairs = per;
    return out;
}

// ----------------------------------------------------------------- submesh

SubMesh extract_submesh(const Mesh& mesh, const std::function<bool(int)>& region_pred) {
    SubMesh sm;
    std::vector<int> map(mesh.nodes.size(), -1);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        if (!region_pred(mesh.region[t])) continue;
        for (int k = 0; k < 3; ++k) map[mesh.tris[t][k]] = 0;
    }
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
        if (map[v] < 0) continue;
        map[v] = static_cast<int>(sm.mesh.nodes.size());
        sm.mesh.nodes.push_back(mesh.nodes[v]);
        sm.node_to_parent.push_back(static_cast<int>(v));
    }
    std::set<EdgeKey> kept_edges;
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        if (!region_pred(mesh.region[t])) continue;
        const auto& T = mesh.tris[t];
        sm.mesh.tris.push_back({map[T[0]], map[T[1]], map[T[2]]});
        sm.mesh.region.push_back(mesh.region[t]);
        sm.tri_to_parent.push_back(static_cast<int>(t));
        for (int k = 0; k < 3; ++k) kept_edges.insert(key(T[k], T[(k + 1) % 3]));
    }
    for (const auto& e : mesh.edges)
        if (kept_edges.count(key(e.a, e.b))) sm.mesh.edges.push_back({map[e.a], map[e.b], e.marker});
    for (const auto& [a, b] : mesh.gamma_pairs)
        if (map[a] >= 0 && map[b] >= 0) sm.mesh.gamma_pairs.push_back({map[a], map[b]});
    for (const auto& [a, b] : mesh.periodic_pairs)
        if (map[a] >= 0 && map[b] >= 0) sm.mesh.periodic_pairs.push_back({map[a], map[b]});
    return sm;
}

void pair_lateral_nodes(Mesh& mesh) {
    std::vector<int> left = mesh.marked_nodes(EdgeKind::LateralLeft);
    std::vector<int> right = mesh.marked_nodes(EdgeKind::LateralRight);
    auto by_y = [&](int a, int b) { return mesh.nodes[a].y < mesh.nodes[b].y; };
    std::sort(left.begin(), left.end(), by_y);
    std::sort(right.begin(), right.end(), by_y);
    if (left.size() != right.size())
        fail(ErrorKind::MeshFailure, "lateral sides carry different node counts (" + std::to_string(left.size()) +
                                         " vs " + std::to_string(right.size()) + ")");
    mesh.periodic_pairs.clear();
    for (std::size_t i = 0; i < left.size(); ++i) {
        if (mesh.nodes[left[i]].y != mesh.nodes[right[i]].y)
            fail(ErrorKind::MeshFailure, "lateral node positions do not match");
        mesh.periodic_pairs.push_back({left[i], right[i]});
    }
}

// ------------------------------------------------------------------ export

void export_mesh(const Mesh& mesh, const std::string& directory, const std::string& stem) {
    std::filesystem::create_directories(directory);
    auto open = [&](const std::string& ext) {
        std::ofstream f(std::filesystem::path(directory) / (stem + ext));
        if (!f) fail(ErrorKind::IoError, "cannot write mesh file " + stem + ext);
        f << std::setprecision(17);
        return f;
    };
    {
        auto f = open(".nodes");
        f << "# id x y\n";
        for (std::size_t v = 0; v < mesh.nodes.size(); ++v)
            f << v << ' ' << mesh.nodes[v].x << ' ' << mesh.nodes[v].y << '\n';
    }
    {
        auto f = open(".tris");
        f << "# id n0 n1 n2 region\n";
        for (std::size_t t = 0; t < mesh.tris.size(); ++t)
            f << t << ' ' << mesh.tris[t][0] << ' ' << mesh.tris[t][1] << ' ' << mesh.tris[t][2] << ' '
              << mesh.region[t] << '\n';
    }
    {
        auto f = open(".edges");
        f << "# n0 n1 marker\n";
        for (const auto& e : mesh.edges) f << e.a << ' ' << e.b << ' ' << e.marker << '\n';
    }
    {
        auto f = open(".pairs");
        f << "# kind a b   (gamma: upper lower, periodic: left right)\n";
        for (const auto& [a, b] : mesh.gamma_pairs) f << "gamma " << a << ' ' << b << '\n';
        for (const auto& [a, b] : mesh.periodic_pairs) f << "periodic " << a << ' ' << b << '\n';
    }
}

void export_field(const Mesh& mesh, const std::vector<double>& values, const std::string& path) {
    if (values.size() != mesh.nodes.size()) fail(ErrorKind::MeshMismatch, "field length differs from node count");
    std::ofstream f(path);
    if (!f) fail(ErrorKind::IoError, "cannot write field file " + path);
    f << std::setprecision(17) << "# id x y value\n";
    for (std::size_t v = 0; v < values.size(); ++v)
        f << v << ' ' << mesh.nodes[v].x << ' ' << mesh.nodes[v].y << ' ' << values[v] << '\n';
}

// ----------------------------------------------------------------- locator

std::array<double, 3> barycentric(const Mesh& mesh, int t, Vec2 p) {
    const auto& T = mesh.tris[t];
    Vec2 a = mesh.nodes[T[0]], b = mesh.nodes[T[1]], c = mesh.nodes[T[2]];
    double area = cross(b - a, c - a);
    double l0 = cross(b - p, c - p) / area;
    double l1 = cross(c - p, a - p) / area;
    return {l0, l1, 1.0 - l0 - l1};
}

PointLocator::PointLocator(const Mesh& mesh, std::size_t target_per_cell) : mesh_(&mesh) {
    if (mesh.nodes.empty()) return;
    double xmin = mesh.nodes[0].x, xmax = xmin, ymin = mesh.nodes[0].y, ymax = ymin;
    for (const auto& p : mesh.nodes) {
        xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
    double w = std::max(xmax - xmin, 1e-300), h = std::max(ymax - ymin, 1e-300);
    double cells = std::max(1.0, static_cast<double>(mesh.tris.size()) / static_cast<double>(target_per_cell));
    double s = std::sqrt(w * h / cells);
    nx_ = std::clamp(static_cast<int>(std::ceil(w / s)), 1, 4096);
    ny_ = std::clamp(static_cast<int>(std::ceil(h / s)), 1, 4096);
    x0_ = xmin, y0_ = ymin;
    dx_ = w / nx_, dy_ = h / ny_;
    std::vector<std::size_t> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    auto range = [&](std::size_t t, int& i0, int& i1, int& j0, int& j1) {
        const auto& T = mesh.tris[t];
        double lx = std::min({mesh.nodes[T[0]].x, mesh.nodes[T[1]].x, mesh.nodes[T[2]].x});
        double hx = std::max({mesh.nodes[T[0]].x, mesh.nodes[T[1]].x, mesh.nodes[T[2]].x});
        double ly = std::min({mesh.nodes[T[0]].y, mesh.nodes[T[1]].y, mesh.nodes[T[2]].y});
        double hy = std::max({mesh.nodes[T[0]].y, mesh.nodes[T[1]].y, mesh.nodes[T[2]].y});
        cell_of(lx, ly, i0, j0);
        cell_of(hx, hy, i1, j1);
    };
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        int i0, i1, j0, j1;
        range(t, i0, i1, j0, j1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) count[static_cast<std::size_t>(j) * nx_ + i + 1]++;
    }
    for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
    start_ = count;
    items_.assign(count.back(), 0);
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        int i0, i1, j0, j1;
        range(t, i0, i1, j0, j1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) items_[fill[static_cast<std::size_t>(j) * nx_ + i]++] = static_cast<int>(t);
    }
}

std::size_t PointLocator::cell_of(double x, double y, int& ix, int& iy) const {
    ix = std::clamp(static_cast<int>(std::floor((x - x0_) / dx_)), 0, nx_ - 1);
    iy = std::clamp(static_cast<int>(std::floor((y - y0_) / dy_)), 0, ny_ - 1);
    return static_cast<std::size_t>(iy) * nx_ + ix;
}

int PointLocator::locate(Vec2 p, const std::function<bool(int)>& accept) const {
    if (start_.empty()) return -1;
    int ix, iy;
    std::size_t c = cell_of(p.x, p.y, ix, iy);
    int inside = -1, near = -1;
    double near_min = -1e-9;
    for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
        int t = items_[k];
        if (accept && !accept(t)) continue;
        auto l = barycentric(*mesh_, t, p);
        double m = std::min({l[0], l[1], l[2]});
        if (m >= 0.0) {
            if (inside < 0 || t < inside) inside = t;
        } else if (m > near_min) {
            near = t;
            near_min = m;
        }
    }
    return inside >= 0 ? inside : near;
}

void PointLocator::candidates(Vec2 lo, Vec2 hi, std::vector<int>& out) const {
    out.clear();
    if (start_.empty()) return;
    int i0, j0, i1, j1;
    cell_of(lo.x, lo.y, i0, j0);
    cell_of(hi.x, hi.y, i1, j1);
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
            std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
            for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) out.push_back(items_[k]);
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace sieve

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sieve/vec2.hpp"

namespace sieve {

// Region tags and edge markers are encoded as kind * 10000 + index, where the
// index is the passage number for per-passage kinds and 0 otherwise.
enum class RegionKind : int {
    None = 0,
    OmegaPlus = 1,
    OmegaMinus = 2,
    PassageUpper = 3,
    PassageLower = 4,
    GuardPlus = 5,
    GuardMinus = 6,
    Sieve = 7,
    Upper = 8,
    Lower = 9,
    Domain = 10,
};

enum class EdgeKind : int {
    None = 0,
    Outer = 1,
    Wall = 2,
    SPlus = 3,
    SMinus = 4,
    Mouth = 5,
    GammaChord = 6,
    Gamma = 7,
    LateralLeft = 8,
    LateralRight = 9,
    Axis = 10,
    Robin = 11,
    Dirichlet = 12,
    Separator = 13,
    Inner = 14,
};

constexpr int kTagBase = 10000;
inline int region_tag(RegionKind k, int index = 0) { return static_cast<int>(k) * kTagBase + index; }
inline RegionKind region_kind(int tag) { return static_cast<RegionKind>(tag / kTagBase); }
inline int tag_index(int tag) { return tag % kTagBase; }
inline int edge_marker(EdgeKind k, int index = 0) { return static_cast<int>(k) * kTagBase + index; }
inline EdgeKind edge_kind(int marker) { return static_cast<EdgeKind>(marker / kTagBase); }

struct MeshEdge {
    int a = 0;
    int b = 0;
    int marker = 0;
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> tris;   // counter-clockwise
    std::vector<int> region;                // one tag per triangle
    std::vector<MeshEdge> edges;            // constrained edges (boundary and interior) with markers
    std::vector<std::pair<int, int>> gamma_pairs;     // (upper trace node, lower trace node)
    std::vector<std::pair<int, int>> periodic_pairs;  // (left node, right node)

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_tris() const { return tris.size(); }
    double triangle_area(std::size_t t) const;
    double area() const;
    double region_area(const std::function<bool(int)>& pred) const;
    // Sorted node indices touched by edges whose marker satisfies the predicate.
    std::vector<int> marked_nodes(const std::function<bool(int)>& pred) const;
    std::vector<int> marked_nodes(int marker) const;
    std::vector<int> marked_nodes(EdgeKind kind) const;
    std::vector<MeshEdge> edges_of(EdgeKind kind) const;
    // Throws MeshFailure when an invariant (orientation, edge manifold, pairing) fails.
    void check() const;
};

// Planar straight-line graph input for the triangulator.
struct Pslg {
    struct Segment {
        int a = 0;
        int b = 0;
        int marker = 0;
        int link = -1;          // index of a segment that must receive the same split points
        bool link_reversed = false;
    };
    struct Region {
        Vec2 seed;
        int tag = 0;
        double max_area = 0.0;  // 0 means unconstrained
    };
    std::vector<Vec2> points;
    std::vector<Segment> segments;
    std::vector<Vec2> holes;
    std::vector<Region> regions;

    int add_point(Vec2 p);
    int add_segment(int a, int b, int marker);
    // Adds the polyline p[0], p[1], ..., closing it when `closed` is set; returns the vertex ids.
    std::vector<int> add_polyline(const std::vector<Vec2>& pts, int marker, bool closed);
};

struct MeshParams {
    double h = 0.1;            // bulk size
    double h_neck = 0.0;       // size at graded features; 0 disables grading
    double grading = 0.5;      // growth of the size per unit distance from features
    double max_area = 0.0;     // global area cap; 0 means none
    double min_angle_deg = 20.0;
    double fuse = 1.0 / 16.0;  // triangles shorter than fuse * h(x) are never split for shape
    std::size_t max_vertices = 3'000'000;
};

using SizeField = std::function<double(Vec2)>;

// Constrained Delaunay triangulation with Ruppert refinement. Triangles not
// reached from any region seed carry tag 0.
Mesh triangulate(const Pslg& pslg, const SizeField& size, const MeshParams& params);
Mesh triangulate(const Pslg& pslg, const MeshParams& params);

// Graded size field h(x) = min(h, h_neck + grading * dist(x, features)).
SizeField graded_size(const MeshParams& params, std::vector<std::pair<Vec2, Vec2>> features);

// Nested red refinement of marked triangles with green closure.
Mesh refine(const Mesh& mesh, const std::function<bool(std::size_t)>& marked);
Mesh refine_uniform(const Mesh& mesh);

struct QualityReport {
    double min_angle_deg = 0.0;
    double max_aspect = 0.0;     // longest edge over shortest altitude
    double h_min = 0.0;
    double h_max = 0.0;
    std::vector<std::pair<double, std::size_t>> size_histogram;  // (upper edge length of bin, count)
};
QualityReport quality(const Mesh& mesh);

// Reflects a mesh of the upper half-plane part through x_n = 0; nodes on the
// axis are shared. Tags and markers of the reflected copy are mapped.
Mesh mirror_lower(const Mesh& upper, const std::function<int(int)>& region_map,
                  const std::function<int(int)>& marker_map);

// Duplicates the nodes of edges with the given marker; triangles for which
// `is_lower` holds are rewired to the copies. Fills gamma_pairs.
Mesh double_interface(const Mesh& mesh, int gamma_marker, const std::function<bool(int)>& is_lower);

struct SubMesh {
    Mesh mesh;
    std::vector<int> node_to_parent;
    std::vector<int> tri_to_parent;
};
SubMesh extract_submesh(const Mesh& mesh, const std::function<bool(int)>& region_pred);

// Matches nodes on the two lateral sides (markers LateralLeft / LateralRight) by x_n.
void pair_lateral_nodes(Mesh& mesh);

// Plain-text export: <stem>.nodes, <stem>.tris, <stem>.edges, <stem>.pairs.
void export_mesh(const Mesh& mesh, const std::string& directory, const std::string& stem);
void export_field(const Mesh& mesh, const std::vector<double>& values, const std::string& path);

// Locates the triangle containing a point using a uniform bucket grid.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh, std::size_t target_per_cell = 4);
    // Returns the triangle index or -1. When several triangles contain the point
    // (it lies on an edge) the one accepted by `accept` with lowest index wins.
    int locate(Vec2 p, const std::function<bool(int)>& accept = {}) const;
    // Triangles whose bounding boxes overlap the box [lo, hi].
    void candidates(Vec2 lo, Vec2 hi, std::vector<int>& out) const;
    const Mesh& mesh() const { return *mesh_; }

private:
    std::size_t cell_of(double x, double y, int& ix, int& iy) const;
    const Mesh* mesh_;
    double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
    int nx_ = 1, ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<int> items_;
};

// Barycentric coordinates of p in triangle t.
std::array<double, 3> barycentric(const Mesh& mesh, int t, Vec2 p);

}  // namespace sieve

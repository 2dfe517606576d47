#pragma once

#include <cstddef>
#include <vector>

#include "sieve/geometry.hpp"
#include "sieve/mesh.hpp"

namespace sieve {

struct DomainMeshOptions {
    double h = 0.05;            // bulk size
    double h_neck = 0.0;        // 0: a quarter of the smallest passage feature
    double grading = 0.5;
    double min_angle_deg = 20.0;
    bool use_symmetry = true;   // mesh the upper half and reflect when the geometry allows
    std::size_t max_vertices = 3'000'000;
};

// Smallest length scale of a passage (half-width of its narrowest part).
double passage_min_feature(const Passage& p, double eps);
// True when the passage and its guard balls are symmetric under x_n -> -x_n.
bool passage_symmetric(const Passage& p, double eps);

// Mesh of Omega_eps. Triangles carry OmegaPlus/OmegaMinus, GuardPlus_k/GuardMinus_k
// and PassageUpper_k/PassageLower_k tags; arcs S+-_k, mouths and chords are interior
// constrained edges. Periodic lateral sides come with node pairs.
Mesh mesh_perforated(const ValidatedSpec& spec, const DomainMeshOptions& opts);

// Mesh of the cell G_k = int(T_k u B+_k u B-_k) with SPlus/SMinus boundary markers.
Mesh mesh_cell(const ValidatedSpec& spec, int k, const DomainMeshOptions& opts);

// Gamma-doubled mesh of (-W,W) x (-L,L) with Upper/Lower tags, Gamma edges on the
// upper trace and node pairs to the lower trace.
Mesh mesh_homogenized(double W, double L, Lateral lateral, double h);

// Size field used for the perforated and cell meshes.
SizeField passage_size_field(const ValidatedSpec& spec, const DomainMeshOptions& opts, int only_passage = -1);

// Region predicates.
inline bool is_passage_tag(int tag) {
    auto k = region_kind(tag);
    return k == RegionKind::PassageUpper || k == RegionKind::PassageLower;
}
inline bool is_upper_tag(int tag) {
    auto k = region_kind(tag);
    return k == RegionKind::OmegaPlus || k == RegionKind::GuardPlus || k == RegionKind::PassageUpper ||
           k == RegionKind::Upper;
}
inline bool is_lower_tag(int tag) { return !is_upper_tag(tag); }
int mirror_region(int tag);
int mirror_marker(int marker);

}  // namespace sieve

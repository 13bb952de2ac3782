#pragma once

#include <cstdint>
#include <vector>

#include "gen3d/mesh.hpp"

namespace gen3d {

/// Reference resolution at which atlas padding is measured.
inline constexpr int kAtlasReferenceResolution = 1024;

/// Edge-connected set of faces projected orthographically onto the plane of its
/// dominant normal.
struct Chart {
    std::vector<std::uint32_t> faces;
    Vec3 normal;      // dominant normal (the seed face's normal)
    Vec3 tangent;     // projection frame: (tangent, bitangent, normal) is right-handed
    Vec3 bitangent;
    Vec2 rect_min;    // chart-local bounding rectangle, object units
    Vec2 rect_max;
    // Placement in the atlas, in texels at the reference resolution.
    int atlas_x = 0;
    int atlas_y = 0;
    int atlas_w = 0;
    int atlas_h = 0;
};

struct AtlasSettings {
    double theta_max_deg = 45.0;
    int padding = 4;  // texels at the reference resolution
};

struct AtlasResult {
    Mesh mesh;                  // vertices split along chart boundaries, uv filled
    std::vector<Chart> charts;
    std::vector<std::uint32_t> face_chart;  // chart id per face
    double scale = 0.0;         // texels (reference resolution) per object unit
};

/// Normal-based region growing, orthographic chart projection and decreasing-height shelf
/// packing into [0,1]². Existing UVs are replaced. Throws PackingOverflowError when the
/// charts do not fit even at half the initial scale.
AtlasResult generate_atlas(const Mesh& mesh, const AtlasSettings& settings = {});

/// UV islands of an already-parameterized mesh: faces connected through shared vertex
/// indices. Only `Chart::faces` is filled.
std::vector<Chart> uv_islands(const Mesh& mesh);

/// One side of a seam: a face and the texel-space image of the shared edge within it.
struct SeamSide {
    std::uint32_t face = 0;
    std::uint32_t chart = 0;
    Vec2 uv_a;  // UV (in [0,1]²) of the edge endpoint with the smaller welded id
    Vec2 uv_b;
};

struct SeamEdge {
    std::uint32_t vertex_a = 0;  // welded vertex ids, vertex_a < vertex_b
    std::uint32_t vertex_b = 0;
    SeamSide side[2];
};

using SeamEdgeList = std::vector<SeamEdge>;

/// 3D edges (welded by position) shared by exactly two faces whose charts differ or whose
/// UV images of the edge differ. Sorted by (vertex_a, vertex_b).
SeamEdgeList find_seam_edges(const Mesh& mesh, const std::vector<Chart>& charts);

/// Chart id (or -1) per texel at `size`², rasterizing each chart's UV triangles.
/// `collisions` receives the number of texels claimed by two different charts.
std::vector<std::int32_t> chart_id_map(const Mesh& mesh, const std::vector<Chart>& charts, int size,
                                       std::size_t* collisions = nullptr);

/// Fraction of texels inside some chart triangle at `size`².
double uv_coverage(const Mesh& mesh, int size);

}  // namespace gen3d

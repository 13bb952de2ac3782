#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gen3d/math.hpp"

namespace gen3d {

using Face = std::array<std::uint32_t, 3>;

/// Triangle mesh M = (V, F, U) with optional per-vertex UVs and normals.
///
/// UVs follow the glTF convention: origin at the top-left of the texture image,
/// v growing downwards. OBJ input (v growing upwards) is flipped on load.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec2> uv;       // empty, or one per vertex
    std::vector<Vec3> normals;  // empty, or one unit normal per vertex

    bool has_uv() const { return !uv.empty(); }
    bool has_normals() const { return !normals.empty(); }
    bool empty() const { return faces.empty(); }

    bool operator==(const Mesh&) const = default;
};

struct ValidationReport {
    std::size_t out_of_range_indices = 0;
    std::size_t degenerate_faces = 0;
    std::size_t out_of_range_uvs = 0;
    std::size_t non_manifold_edges = 0;  // warning only
    bool pass = true;
};

/// Faces with area below this are reported as degenerate.
inline constexpr double kDegenerateArea = 1e-14;

/// Parses OBJ text (v/vt/vn/f, 1-based or negative indices). Quads and larger polygons
/// are fanned from their first corner, so a quad splits along v0–v2. Corners with
/// distinct (position, uv, normal) index tuples become distinct vertices.
/// The result is normalized to the unit cube; normals are computed if the file has none.
Mesh load_obj(std::string_view text);
Mesh load_obj_file(const std::string& path);

/// Geometry (and UVs/normals when present) as OBJ text, UVs flipped back to OBJ convention.
std::string save_obj(const Mesh& mesh);

ValidationReport validate_mesh(const Mesh& mesh);

/// Area-weighted average of incident face normals, normalized.
std::vector<Vec3> compute_vertex_normals(const Mesh& mesh);

/// Unit normal of a face (zero for degenerate faces).
Vec3 face_normal(const Mesh& mesh, std::size_t face);
double face_area(const Mesh& mesh, std::size_t face);

/// Centers the bounding box at the origin and scales its largest extent to 1.
void normalize_to_unit_cube(Mesh& mesh);

struct Bounds {
    Vec3 min;
    Vec3 max;
};
Bounds bounding_box(const Mesh& mesh);

/// Maps each vertex to the lowest-indexed vertex at a bit-identical position.
/// Vertices split along UV seams share an id.
std::vector<std::uint32_t> weld_positions(const Mesh& mesh);

/// Stable content hash of positions, faces, UVs and normals.
std::uint64_t mesh_hash(const Mesh& mesh);

}  // namespace gen3d

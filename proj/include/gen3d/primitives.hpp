#pragma once

#include "gen3d/mesh.hpp"

// Parametric meshes used as fixtures and as the geometry source of the procedural
// view generator. None of these are normalized; sizes are in object units.
namespace gen3d::primitives {

/// Axis-aligned box centered at `center` with the given half extents, 8 vertices / 12 faces.
Mesh box(Vec3 center, Vec3 half_extent);

/// Box with each face subdivided into `n`×`n` quads (unshared vertices along the cube edges
/// are welded, so the mesh is closed).
Mesh subdivided_box(Vec3 center, Vec3 half_extent, int n);

/// Icosahedron subdivided `level` times and projected onto the sphere.
Mesh icosphere(Vec3 center, double radius, int level);

/// Torus around the y axis. `major` is the ring radius, `minor` the tube radius.
Mesh torus(Vec3 center, double major, double minor, int ring_segments, int tube_segments);

/// Capsule along the y axis: cylinder of `half_height` capped by hemispheres of `radius`.
Mesh capsule(Vec3 center, double radius, double half_height, int segments, int rings);

/// `n`×`n` quad grid in the z = 0 plane spanning [-half, half]², facing +z, with UVs.
Mesh planar_grid(double half, int n);

/// Concatenates meshes; vertex attributes are kept only when every part has them.
Mesh merge(const std::vector<Mesh>& parts);

}  // namespace gen3d::primitives

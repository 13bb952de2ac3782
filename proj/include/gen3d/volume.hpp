#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gen3d/mesh.hpp"
#include "gen3d/rasterizer.hpp"

namespace gen3d {

/// Regular grid of truncated signed distances sampled at cell corners.
/// Negative inside, positive outside, |value| ≤ truncation.
struct SDFGrid {
    int resolution = 0;  // corners per axis
    Vec3 origin;         // position of corner (0,0,0)
    double cell = 0.0;
    double truncation = 0.0;  // τ
    std::vector<float> values;
    std::vector<float> weights;

    /// Grid over the unit cube padded by two cells, all corners at +τ with zero weight.
    static SDFGrid unit_cube(int resolution, double truncation_cells);

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * resolution + j) * resolution + i;
    }
    Vec3 corner(int i, int j, int k) const { return origin + Vec3{i * cell, j * cell, k * cell}; }
    Vec3 bounds_min() const { return origin; }
    Vec3 bounds_max() const { return origin + Vec3{1, 1, 1} * (cell * (resolution - 1)); }
};

struct FusionSettings {
    int resolution = 64;
    double truncation_cells = 3.0;  // τ in cells
    double carve_weight = 0.25;
    double observation_weight = 1.0;
    double interior_weight = 0.25;  // per view, for corners hidden behind the surface everywhere
};

/// Exact Euclidean distance in pixels from every pixel center to the nearest covered pixel
/// center, row-major; 0 on covered pixels, +inf everywhere when the mask is empty.
std::vector<float> silhouette_distance(const RenderedView& view);

/// Truncated signed distance fusion of depth+mask views.
///
/// Per corner and view (views visited in order of camera azimuth, then elevation), when
/// the corner projects inside the frustum:
///   - onto a masked-out pixel: sample min(τ, distance from the silhouette) with the carving
///     weight, the distance being the pixel distance to the nearest covered pixel times the
///     pixel size at the corner's depth;
///   - onto a covered pixel: s = depth(pixel) − corner depth; samples with s < −τ lie
///     behind the observed surface and are skipped, others contribute min(s·c, τ) with the
///     observation weight, c = |n·ray| for the pixel normal n (point-to-plane distance;
///     c = 1 where the view has no normal).
/// The fused value is the weighted mean. A corner with no samples but hidden behind the
/// surface in n views is interior: −min(τ, smallest |s|·c over those views) with weight
/// n·interior_weight. Corners never seen stay at +τ, weight 0.
SDFGrid fuse_views_to_sdf(std::span<const RenderedView> views, std::span<const Camera> cameras,
                          const FusionSettings& settings = {});

/// Trilinear interpolation of corner values; throws InputError outside the grid bounds.
double sample_sdf(const SDFGrid& grid, const Vec3& point);

/// Marching cubes with the classic 256-case table and linear edge interpolation.
/// Corners with weight < min_weight are treated as +τ. Vertices on shared grid edges are
/// welded; faces are wound so normals point towards increasing distance. Grid coordinates
/// are kept (no normalization). Throws EmptySurfaceError when nothing crosses `iso`.
Mesh marching_cubes(const SDFGrid& grid, double iso = 0.0, double min_weight = 0.5);

/// Writes `<stem>.raw` (little-endian float32 values, x fastest) and `<stem>.json`
/// ({resolution, bounds_min, bounds_max, cell, truncation}).
void dump_sdf(const SDFGrid& grid, const std::filesystem::path& stem);

}  // namespace gen3d

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gen3d/image.hpp"
#include "gen3d/materials.hpp"
#include "gen3d/mesh.hpp"

namespace gen3d {

/// Pinhole camera with a square image. Pixel (i, j) covers [i, i+1) × [j, j+1) with
/// its center at (i + 0.5, j + 0.5); x grows right, y grows down.
struct Camera {
    Vec3 position{0.0, 0.0, 2.2};
    Vec3 target{0.0, 0.0, 0.0};
    Vec3 up{0.0, 1.0, 0.0};
    double fov_deg = 40.0;  // vertical
    int resolution = 512;
    double near_plane = 0.1;
    double far_plane = 10.0;

    /// Throws InputError when position == target, fov ∉ (0, 180), near ≥ far or resolution < 1.
    void validate() const;

    Vec3 forward() const;
    Vec3 right() const;
    Vec3 true_up() const;

    /// Azimuth around +y in degrees in [0, 360); 0 looks from +z.
    double azimuth_deg() const;
    double elevation_deg() const;

    /// World-space unit direction of the ray through a continuous pixel coordinate.
    Vec3 ray_direction(Vec2 pixel) const;
    /// Focal length in pixels.
    double focal_px() const;
};

enum class ElevationPattern {
    ring,         // every camera at +elevation
    alternating,  // odd-indexed cameras at −elevation, so the underside is observed too
};

/// K cameras on a ring: azimuth 360°·i/K, common distance, aimed at the origin, ordered by
/// azimuth. Throws InputError when k < 1.
std::vector<Camera> canonical_cameras(int k, double elevation_deg, double radius, int resolution,
                                      double fov_deg = 40.0, ElevationPattern pattern = ElevationPattern::ring);

struct Projection {
    Vec2 pixel;
    double depth = 0.0;  // camera-space z along the forward axis
    bool in_frustum = false;
};

Projection project(const Vec3& point, const Camera& camera);

/// Sentinel depth of uncovered pixels.
inline constexpr float kNoDepth = std::numeric_limits<float>::infinity();

/// One rendered view I_k. All buffers are `resolution`², row 0 at the top.
struct RenderedView {
    int resolution = 0;
    Image shaded;    // RGB, lit
    Image albedo;    // RGB, unlit base color
    Image material;  // 2 channels: roughness, metalness
    Image normal;    // world-space unit normal in [-1,1]³
    Image depth;     // 1 channel, camera-space z; kNoDepth where mask is 0
    std::vector<std::uint8_t> mask;

    explicit RenderedView(int res = 0);

    bool covered(int x, int y) const { return mask[static_cast<std::size_t>(y) * resolution + x] != 0; }
};

/// Material used when a mesh is rasterized without textures.
inline constexpr MaterialSample kDefaultMaterial{{0.8, 0.8, 0.8}, 0.8, 0.0};

/// Z-buffered perspective rasterization with a top-left fill rule at pixel centers.
/// UVs and normals are interpolated perspective-correctly. Triangles with a vertex in
/// front of the near plane are culled; samples beyond the far plane are discarded.
RenderedView rasterize(const Mesh& mesh, const Camera& camera, const PBRTextureSet* materials,
                       const LightConfig& light);

/// Bilinear weights of the (up to four) pixels around a continuous coordinate whose depth
/// agrees with `reference_depth` to within `slack`. Weights are renormalized over the
/// accepted pixels; the result is empty when none qualify.
struct PixelFootprint {
    int count = 0;
    std::array<int, 4> x{};
    std::array<int, 4> y{};
    std::array<double, 4> w{};
};
PixelFootprint depth_consistent_footprint(const RenderedView& view, Vec2 pixel, double reference_depth,
                                          double slack);

/// Interpolated depth over a footprint.
double footprint_depth(const RenderedView& view, const PixelFootprint& fp);

/// World-space size of one pixel at camera depth `z`.
double pixel_world_size(const Camera& camera, double z);

}  // namespace gen3d

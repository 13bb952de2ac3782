#pragma once

#include <array>
#include <vector>

#include "gen3d/math.hpp"

namespace gen3d {

struct Texture;

/// Albedo (RGB), roughness and metalness maps of equal size, all values in [0,1].
struct PBRTextureSet {
    int size = 0;
    std::vector<float> albedo;     // size*size*3, interleaved RGB
    std::vector<float> roughness;  // size*size
    std::vector<float> metalness;  // size*size

    PBRTextureSet() = default;
    explicit PBRTextureSet(int l)
        : size(l),
          albedo(static_cast<std::size_t>(l) * l * 3, 0.0f),
          roughness(static_cast<std::size_t>(l) * l, 0.0f),
          metalness(static_cast<std::size_t>(l) * l, 0.0f) {}

    static PBRTextureSet constant(int l, Vec3 albedo, double roughness, double metalness);

    bool operator==(const PBRTextureSet&) const = default;
};

struct LightConfig {
    Vec3 direction = normalize(Vec3{0.3, 0.8, 0.6});  // unit vector pointing towards the light
    Vec3 intensity{0.8, 0.8, 0.8};
    Vec3 ambient{0.2, 0.2, 0.2};
};

/// Surface material sample fed to `shade`.
struct MaterialSample {
    Vec3 albedo;
    double roughness = 0.8;
    double metalness = 0.0;
};

/// Deterministic analytic shading used for the "shaded" view channel.
///
/// With n·l, n·v clamped to [0,1], h = normalize(l + v), α = max(roughness², 1e-3):
///
///     D  = α² / (π ((n·h)² (α² − 1) + 1)²)                       GGX distribution
///     V  = 0.5 / (n·l √((n·v)²(1 − α²) + α²) + n·v √((n·l)²(1 − α²) + α²))
///                                                                 height-correlated Smith
///     F0 = mix(0.04, albedo, metalness)
///     F  = F0 + (1 − F0)(1 − v·h)⁵                               Schlick
///     diffuse  = albedo (1 − metalness) n·l
///     specular = π D V F n·l
///     out = clamp(ambient·albedo + light·min(1, diffuse + specular), 0, 1)
///
/// Diffuse omits the 1/π of a Lambertian BRDF, so specular carries the matching π. The
/// min(1, ·) keeps the output within ambient + light intensity.
Vec3 shade(const MaterialSample& material, const Vec3& normal, const Vec3& view_dir, const LightConfig& light);

/// Splits a 5-channel texture into albedo/roughness/metalness, clamping to [0,1].
/// Throws InputError for a 3-channel texture.
PBRTextureSet split_channels(const Texture& texture);

/// Inverse of `split_channels`: a 5-channel texture with full coverage.
Texture interleave_channels(const PBRTextureSet& set);

/// Bilinear material lookup at a UV coordinate (clamp-to-edge, texel centers at (i+0.5)/L).
MaterialSample sample_material(const PBRTextureSet& set, const Vec2& uv);

}  // namespace gen3d

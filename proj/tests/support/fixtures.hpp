#pragma once

// Shared test fixtures. Unlike oracles.hpp these are built with the library itself.

#include <cmath>
#include <string>
#include <vector>

#include "gen3d/atlas.hpp"
#include "gen3d/generators.hpp"
#include "gen3d/materials.hpp"
#include "gen3d/primitives.hpp"
#include "gen3d/texture.hpp"

namespace fixture {

using namespace gen3d;

/// Smooth ground-truth material as a function of position; `freq` scales every lobe.
inline std::array<double, 5> smooth_material(const Vec3& q, double freq) {
    const Vec3 p = q * freq;
    return {0.5 + 0.35 * std::sin(3 * p.x + 1) * std::cos(2 * p.y), 0.5 + 0.35 * std::sin(2.5 * p.z - 0.5),
            0.4 + 0.3 * std::cos(3 * p.y + 2 * p.x), 0.5 + 0.3 * std::sin(2 * p.z), 0.3 + 0.2 * std::cos(2 * p.x)};
}

struct TexturedMesh {
    std::string name;
    Mesh mesh;        // with atlas UVs
    Texture texture;  // 5 channels; footprint set, gutter dilated
};

/// Atlases `mesh` and paints `smooth_material` into every covered texel at `size`².
inline TexturedMesh textured(const std::string& name, const Mesh& mesh, int size, double freq = 4.0) {
    TexturedMesh out{name, generate_atlas(mesh).mesh, Texture(size, 5)};
    Texture& t = out.texture;
    t.coverage.assign(t.texel_count(), 0);
    for_each_uv_texel(out.mesh, size, [&](int x, int y, std::size_t face, const std::array<double, 3>& b) {
        const auto& f = out.mesh.faces[face];
        const Vec3 p = out.mesh.vertices[f[0]] * b[0] + out.mesh.vertices[f[1]] * b[1] + out.mesh.vertices[f[2]] * b[2];
        const auto v = smooth_material(p, freq);
        const std::size_t i = static_cast<std::size_t>(y) * size + x;
        for (int c = 0; c < 5; ++c) {
            t.pixels[i * 5 + c] = static_cast<float>(v[c]);
        }
        t.coverage[i] = 1;
    });
    t.footprint = t.coverage;
    t = fill_holes(t, 8);
    return out;
}

/// The default four-view rig at view resolution 512.
inline std::vector<Camera> four_view_rig() {
    return canonical_cameras(4, 20.0, 2.2, 512, 40.0, ElevationPattern::alternating);
}

inline std::vector<TexturedMesh> round_trip_suite(int size) {
    return {textured("cube", primitives::box({0, 0, 0}, {0.35, 0.35, 0.35}), size),
            textured("icosphere", primitives::icosphere({0, 0, 0}, 0.4, 4), size),
            textured("torus", primitives::torus({0, 0, 0}, 0.3, 0.12, 96, 48), size)};
}

struct RoundTripError {
    double mean = 0.0;
    double max = 0.0;
    std::size_t texels = 0;
};

/// Per-channel error of `fused` against `truth` over footprint texels with confidence ≥ 0.5.
inline RoundTripError round_trip_error(const Texture& fused, const Texture& truth) {
    RoundTripError e;
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.texel_count(); ++i) {
        if (!truth.in_footprint(i) || fused.confidence[i] < 0.5f) {
            continue;
        }
        ++e.texels;
        for (int c = 0; c < truth.channels; ++c) {
            const double d = std::abs(fused.pixels[i * truth.channels + c] - truth.pixels[i * truth.channels + c]);
            sum += d;
            e.max = std::max(e.max, d);
        }
    }
    e.mean = e.texels ? sum / (static_cast<double>(e.texels) * truth.channels) : 0.0;
    return e;
}

/// The prompt's procedural material evaluated directly at every texel's surface point.
inline Texture procedural_reference(const Mesh& mesh, const Prompt& prompt, int size) {
    const ProceduralMaterial material(prompt);
    Texture t(size, 5);
    t.coverage.assign(t.texel_count(), 0);
    for_each_uv_texel(mesh, size, [&](int x, int y, std::size_t face, const std::array<double, 3>& b) {
        const auto& f = mesh.faces[face];
        const Vec3 p = mesh.vertices[f[0]] * b[0] + mesh.vertices[f[1]] * b[1] + mesh.vertices[f[2]] * b[2];
        const auto v = material.evaluate(p, face_normal(mesh, face));
        const std::size_t i = static_cast<std::size_t>(y) * size + x;
        for (int c = 0; c < 5; ++c) {
            t.pixels[i * 5 + c] = static_cast<float>(v[c]);
        }
        t.coverage[i] = 1;
    });
    t.footprint = t.coverage;
    return t;
}

/// Conditioned procedural views with jitter σ, baked and fused, against the direct evaluation.
inline RoundTripError jittered_round_trip(const Mesh& mesh, const Prompt& prompt, double sigma, int size) {
    const auto cams = four_view_rig();
    const GeometryConditioning cond = render_conditioning(mesh, cams);
    ProceduralSettings settings;
    settings.jitter = sigma;
    ProceduralBackend backend(settings);
    const GeneratedViewSet views = backend.generate(prompt, cams, &cond);
    std::vector<PartialTexture> parts;
    for (std::size_t k = 0; k < cams.size(); ++k) {
        parts.push_back(bake_view_to_partial(mesh, views.views[k], cams[k], size, static_cast<int>(k)));
    }
    return round_trip_error(fuse_partials(parts, 0.1), procedural_reference(mesh, prompt, size));
}

}  // namespace fixture

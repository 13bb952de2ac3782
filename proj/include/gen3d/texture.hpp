#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gen3d/atlas.hpp"
#include "gen3d/mesh.hpp"
#include "gen3d/rasterizer.hpp"

namespace gen3d {

/// L×L texture T with C ∈ {3, 5} interleaved channels.
/// C = 3: shaded RGB. C = 5: albedo RGB, roughness, metalness.
struct Texture {
    int size = 0;
    int channels = 0;
    std::vector<float> pixels;
    std::vector<std::uint8_t> coverage;   // 1 where the texel holds observed or filled content
    std::vector<std::uint8_t> footprint;  // 1 where the texel lies inside some UV triangle; empty = everywhere
    std::vector<float> confidence;        // fused confidence (max over accepted views); may be empty

    Texture() = default;
    Texture(int l, int c);

    std::size_t texel_count() const { return static_cast<std::size_t>(size) * size; }
    float* texel(std::size_t i) { return pixels.data() + i * channels; }
    const float* texel(std::size_t i) const { return pixels.data() + i * channels; }
    bool in_footprint(std::size_t i) const { return footprint.empty() || footprint[i] != 0; }

    /// Throws InputError unless L is a power of two, C ∈ {3,5} and buffer sizes agree.
    void validate() const;
};

/// Re-projection of one view into UV space (T_k).
struct PartialTexture {
    int size = 0;
    int channels = 0;
    int view_index = 0;
    std::vector<float> pixels;
    std::vector<float> confidence;        // 0 exactly where nothing was written
    std::vector<std::uint8_t> footprint;  // texels inside some UV triangle
};

struct BakeSettings {
    int channels = 5;
    double depth_tolerance = 1e-3;    // δ_d
    double confidence_exponent = 2.0;  // p
};

/// Rasterizes every face into UV space at resolution `size`; each covered texel is
/// projected into `camera` and accepted when it is in the frustum, lands on the view's
/// mask and its depth agrees with the view's interpolated depth to within δ_d.
/// Accepted texels get the bilinearly sampled view colors and confidence max(0, n·v)^p.
PartialTexture bake_view_to_partial(const Mesh& mesh, const RenderedView& view, const Camera& camera, int size,
                                    int view_index, const BakeSettings& settings = {});

/// Per texel: Σ c_k·T_k / Σ c_k over partials with c_k ≥ floor, summed in view-index order.
Texture fuse_partials(std::span<const PartialTexture> partials, double floor);

/// Pull-push hole filling inside the footprint, then `padding` rings of dilation outside it;
/// anything still empty gets the per-channel mean of the covered texels.
Texture fill_holes(const Texture& texture, int padding);

struct SeamSettings {
    int iterations = 8;
    double relaxation = 0.7;       // λ
    double samples_per_texel = 2;  // S
};

/// Seam-aware smoothing: mismatches between the two UV images of every seam edge are
/// relaxed towards their average, and the correction is blended one texel ring further
/// into each chart per iteration with linear distance falloff.
/// `metric_trace`, when given, receives the discontinuity metric before the first and
/// after every iteration.
Texture fix_seams(const Mesh& mesh, const SeamEdgeList& seams, const Texture& texture, const SeamSettings& settings,
                  std::vector<double>* metric_trace = nullptr);

/// Mean |T(a) − T(b)| over channels and seam samples, where a and b are the two UV images of
/// the same point on a seam edge (bilinear lookups, S samples per texel of edge length).
double seam_discontinuity(const SeamEdgeList& seams, const Texture& texture, double samples_per_texel = 2);

/// Separable Lanczos-3 upscaling by 2 or 4; masks are upscaled nearest-neighbor.
Texture upscale(const Texture& texture, int factor);

/// Lanczos-3 kernel: sinc(x)·sinc(x/3) for |x| < 3, else 0.
double lanczos3(double x);

/// Bilinear lookup of all channels at a continuous texel coordinate (clamp to edge).
void sample_bilinear(const Texture& texture, Vec2 texel_pos, std::span<double> out);

/// Texels whose centers are covered by some UV triangle (top-left rule).
std::vector<std::uint8_t> uv_footprint(const Mesh& mesh, int size);

/// Calls `fn(x, y, face, barycentrics)` for every texel center covered by a UV triangle.
template <typename Fn>
void for_each_uv_texel(const Mesh& mesh, int size, Fn&& fn);

}  // namespace gen3d

#include "gen3d/detail/uv_raster.hpp"

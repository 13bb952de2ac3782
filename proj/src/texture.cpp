#include "gen3d/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gen3d/error.hpp"

namespace gen3d {

Texture::Texture(int l, int c)
    : size(l),
      channels(c),
      pixels(static_cast<std::size_t>(l) * l * c, 0.0f),
      coverage(static_cast<std::size_t>(l) * l, 0) {}

void Texture::validate() const {
    if (!is_power_of_two(size)) {
        throw InputError("texture size must be a power of two, got " + std::to_string(size));
    }
    if (channels != 3 && channels != 5) {
        throw InputError("texture must have 3 or 5 channels, got " + std::to_string(channels));
    }
    if (pixels.size() != texel_count() * channels || coverage.size() != texel_count() ||
        (!footprint.empty() && footprint.size() != texel_count()) ||
        (!confidence.empty() && confidence.size() != texel_count())) {
        throw InputError("texture buffers do not match its size");
    }
}

std::vector<std::uint8_t> uv_footprint(const Mesh& mesh, int size) {
    std::vector<std::uint8_t> fp(static_cast<std::size_t>(size) * size, 0);
    if (!mesh.has_uv()) {
        return fp;
    }
    for_each_uv_texel(mesh, size, [&](int x, int y, std::size_t, const std::array<double, 3>&) {
        fp[static_cast<std::size_t>(y) * size + x] = 1;
    });
    return fp;
}

// ---------------------------------------------------------------------------------------
// Baking

PartialTexture bake_view_to_partial(const Mesh& mesh, const RenderedView& view, const Camera& camera, int size,
                                    int view_index, const BakeSettings& settings) {
    if (!mesh.has_uv()) {
        throw InputError("bake_view_to_partial: mesh has no UVs");
    }
    if (!is_power_of_two(size)) {
        throw InputError("bake_view_to_partial: resolution must be a power of two, got " + std::to_string(size));
    }
    if (settings.channels != 3 && settings.channels != 5) {
        throw InputError("bake_view_to_partial: channel count must be 3 or 5");
    }
    if (view.resolution != camera.resolution) {
        throw InputError("bake_view_to_partial: view and camera resolutions differ");
    }
    camera.validate();

    const int channels = settings.channels;
    PartialTexture out;
    out.size = size;
    out.channels = channels;
    out.view_index = view_index;
    const std::size_t texels = static_cast<std::size_t>(size) * size;
    out.pixels.assign(texels * channels, 0.0f);
    out.confidence.assign(texels, 0.0f);
    out.footprint.assign(texels, 0);

    const std::vector<Vec3> computed = mesh.has_normals() ? std::vector<Vec3>{} : compute_vertex_normals(mesh);
    const std::vector<Vec3>& normals = mesh.has_normals() ? mesh.normals : computed;

    for_each_uv_texel(mesh, size, [&](int x, int y, std::size_t f, const std::array<double, 3>& bc) {
        const std::size_t idx = static_cast<std::size_t>(y) * size + x;
        out.footprint[idx] = 1;
        const Face& face = mesh.faces[f];
        const Vec3 point =
            mesh.vertices[face[0]] * bc[0] + mesh.vertices[face[1]] * bc[1] + mesh.vertices[face[2]] * bc[2];
        const Vec3 normal = normalize(normals[face[0]] * bc[0] + normals[face[1]] * bc[1] + normals[face[2]] * bc[2]);

        const Projection proj = project(point, camera);
        if (!proj.in_frustum) {
            return;
        }
        // Neighbouring pixels may belong to a different surface; only those close in depth
        // contribute, and the interpolated depth must then match within δ_d.
        const double slack = std::max(settings.depth_tolerance, 3.0 * pixel_world_size(camera, proj.depth));
        const PixelFootprint fp = depth_consistent_footprint(view, proj.pixel, proj.depth, slack);
        if (fp.count == 0 || std::abs(footprint_depth(view, fp) - proj.depth) >= settings.depth_tolerance) {
            return;
        }
        const double facing = std::max(0.0, dot(normal, normalize(camera.position - point)));
        const auto confidence = static_cast<float>(std::pow(facing, settings.confidence_exponent));
        if (!(confidence > out.confidence[idx])) {
            return;
        }
        out.confidence[idx] = confidence;
        float* dst = out.pixels.data() + idx * channels;
        for (int c = 0; c < channels; ++c) {
            double v = 0.0;
            for (int k = 0; k < fp.count; ++k) {
                float s;
                if (channels == 3) {
                    s = view.shaded.at(fp.x[k], fp.y[k], c);
                } else if (c < 3) {
                    s = view.albedo.at(fp.x[k], fp.y[k], c);
                } else {
                    s = view.material.at(fp.x[k], fp.y[k], c - 3);
                }
                v += fp.w[k] * s;
            }
            dst[c] = static_cast<float>(v);
        }
    });
    return out;
}

// ---------------------------------------------------------------------------------------
// Fusion

Texture fuse_partials(std::span<const PartialTexture> partials, double floor) {
    if (partials.empty()) {
        throw InputError("fuse_partials: no partial textures");
    }
    const int size = partials.front().size;
    const int channels = partials.front().channels;
    const std::size_t texels = static_cast<std::size_t>(size) * size;
    for (const auto& p : partials) {
        if (p.size != size || p.channels != channels || p.pixels.size() != texels * channels ||
            p.confidence.size() != texels) {
            throw InputError("fuse_partials: partial textures differ in shape");
        }
    }
    std::vector<std::size_t> order(partials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return partials[a].view_index < partials[b].view_index; });

    Texture out(size, channels);
    out.confidence.assign(texels, 0.0f);
    out.footprint.assign(texels, 0);
    std::vector<double> acc(static_cast<std::size_t>(channels));
    for (std::size_t i = 0; i < texels; ++i) {
        double weight = 0.0;
        float best = 0.0f;
        std::fill(acc.begin(), acc.end(), 0.0);
        std::uint8_t in_footprint = 0;
        for (std::size_t k : order) {
            const PartialTexture& p = partials[k];
            if (!p.footprint.empty() && p.footprint[i] != 0) {
                in_footprint = 1;
            }
            const float c = p.confidence[i];
            if (!(c > 0.0f) || c < floor) {
                continue;
            }
            weight += c;
            best = std::max(best, c);
            const float* src = p.pixels.data() + i * channels;
            for (int ch = 0; ch < channels; ++ch) {
                acc[static_cast<std::size_t>(ch)] += static_cast<double>(c) * src[ch];
            }
        }
        out.footprint[i] = in_footprint;
        if (weight > 0.0) {
            float* dst = out.texel(i);
            for (int ch = 0; ch < channels; ++ch) {
                dst[ch] = static_cast<float>(acc[static_cast<std::size_t>(ch)] / weight);
            }
            out.coverage[i] = 1;
            out.confidence[i] = best;
        }
    }
    if (std::all_of(partials.begin(), partials.end(), [](const PartialTexture& p) { return p.footprint.empty(); })) {
        out.footprint.clear();
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Hole filling

Texture fill_holes(const Texture& texture, int padding) {
    texture.validate();
    const int size = texture.size;
    const int channels = texture.channels;
    const std::size_t texels = texture.texel_count();
    const auto covered_count = std::count(texture.coverage.begin(), texture.coverage.end(), std::uint8_t{1});
    if (covered_count == 0) {
        throw InputError("fill_holes: texture has no covered texels");
    }

    // Pull: coverage-weighted mip pyramid. Weights count covered descendants.
    struct Level {
        int size;
        std::vector<double> value;
        std::vector<double> weight;
    };
    std::vector<Level> pyramid;
    {
        Level base{size, std::vector<double>(texels * channels), std::vector<double>(texels)};
        for (std::size_t i = 0; i < texels; ++i) {
            if (texture.coverage[i] != 0) {
                base.weight[i] = 1.0;
                for (int c = 0; c < channels; ++c) {
                    base.value[i * channels + c] = texture.pixels[i * channels + c];
                }
            }
        }
        pyramid.push_back(std::move(base));
    }
    while (pyramid.back().size > 1) {
        const Level& child = pyramid.back();
        const int ps = child.size / 2;
        Level parent{ps, std::vector<double>(static_cast<std::size_t>(ps) * ps * channels),
                     std::vector<double>(static_cast<std::size_t>(ps) * ps)};
        for (int y = 0; y < ps; ++y) {
            for (int x = 0; x < ps; ++x) {
                const std::size_t pi = static_cast<std::size_t>(y) * ps + x;
                double w = 0.0;
                for (int k = 0; k < 4; ++k) {
                    const std::size_t ci = static_cast<std::size_t>(2 * y + (k >> 1)) * child.size + (2 * x + (k & 1));
                    const double cw = child.weight[ci];
                    if (cw > 0.0) {
                        w += cw;
                        for (int c = 0; c < channels; ++c) {
                            parent.value[pi * channels + c] += cw * child.value[ci * channels + c];
                        }
                    }
                }
                if (w > 0.0) {
                    for (int c = 0; c < channels; ++c) {
                        parent.value[pi * channels + c] /= w;
                    }
                }
                parent.weight[pi] = w;
            }
        }
        pyramid.push_back(std::move(parent));
    }

    // Push: empty texels take the bilinear interpolation of the (already filled) coarser level.
    for (int l = static_cast<int>(pyramid.size()) - 2; l >= 0; --l) {
        Level& level = pyramid[static_cast<std::size_t>(l)];
        const Level& coarse = pyramid[static_cast<std::size_t>(l) + 1];
        const int cs = coarse.size;
        for (int y = 0; y < level.size; ++y) {
            for (int x = 0; x < level.size; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * level.size + x;
                if (level.weight[i] > 0.0) {
                    continue;
                }
                const double gx = std::clamp((x + 0.5) * 0.5 - 0.5, 0.0, cs - 1.0);
                const double gy = std::clamp((y + 0.5) * 0.5 - 0.5, 0.0, cs - 1.0);
                const int x0 = static_cast<int>(gx), y0 = static_cast<int>(gy);
                const int x1 = std::min(x0 + 1, cs - 1), y1 = std::min(y0 + 1, cs - 1);
                const double fx = gx - x0, fy = gy - y0;
                for (int c = 0; c < channels; ++c) {
                    auto at = [&](int xx, int yy) {
                        return coarse.value[(static_cast<std::size_t>(yy) * cs + xx) * channels + c];
                    };
                    const double top = at(x0, y0) + (at(x1, y0) - at(x0, y0)) * fx;
                    const double bottom = at(x0, y1) + (at(x1, y1) - at(x0, y1)) * fx;
                    level.value[i * channels + c] = top + (bottom - top) * fy;
                }
            }
        }
    }

    Texture out = texture;
    const Level& filled = pyramid.front();
    std::vector<std::uint8_t> done(texels, 0);
    for (std::size_t i = 0; i < texels; ++i) {
        if (!texture.in_footprint(i)) {
            continue;
        }
        done[i] = 1;
        if (texture.coverage[i] == 0) {
            for (int c = 0; c < channels; ++c) {
                out.pixels[i * channels + c] = static_cast<float>(filled.value[i * channels + c]);
            }
        }
        out.coverage[i] = 1;
    }

    // Dilate outwards from the charts, one ring at a time.
    for (int ring = 0; ring < padding; ++ring) {
        std::vector<std::size_t> frontier;
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * size + x;
                if (done[i]) {
                    continue;
                }
                bool touches = false;
                for (int dy = -1; dy <= 1 && !touches; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx >= 0 && ny >= 0 && nx < size && ny < size &&
                            done[static_cast<std::size_t>(ny) * size + nx] == 1) {
                            touches = true;
                            break;
                        }
                    }
                }
                if (touches) {
                    frontier.push_back(i);
                }
            }
        }
        if (frontier.empty()) {
            break;
        }
        for (std::size_t i : frontier) {
            const int x = static_cast<int>(i % size), y = static_cast<int>(i / size);
            std::vector<double> sum(static_cast<std::size_t>(channels), 0.0);
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= size || ny >= size) {
                        continue;
                    }
                    const std::size_t j = static_cast<std::size_t>(ny) * size + nx;
                    if (done[j] != 1) {
                        continue;
                    }
                    ++n;
                    for (int c = 0; c < channels; ++c) {
                        sum[static_cast<std::size_t>(c)] += out.pixels[j * channels + c];
                    }
                }
            }
            for (int c = 0; c < channels; ++c) {
                out.pixels[i * channels + c] = static_cast<float>(sum[static_cast<std::size_t>(c)] / n);
            }
        }
        for (std::size_t i : frontier) {
            done[i] = 1;
        }
    }

    // Neutral fill: per-channel mean of the observed texels.
    std::vector<double> mean(static_cast<std::size_t>(channels), 0.0);
    for (std::size_t i = 0; i < texels; ++i) {
        if (texture.coverage[i] != 0) {
            for (int c = 0; c < channels; ++c) {
                mean[static_cast<std::size_t>(c)] += texture.pixels[i * channels + c];
            }
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(covered_count);
    }
    for (std::size_t i = 0; i < texels; ++i) {
        if (!done[i]) {
            for (int c = 0; c < channels; ++c) {
                out.pixels[i * channels + c] = static_cast<float>(mean[static_cast<std::size_t>(c)]);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Seam repair

namespace {

struct Bilinear {
    std::array<std::size_t, 4> texel{};
    std::array<double, 4> w{};
};

Bilinear bilinear_at(int size, Vec2 p) {
    const double gx = std::clamp(p.x - 0.5, 0.0, size - 1.0);
    const double gy = std::clamp(p.y - 0.5, 0.0, size - 1.0);
    const int x0 = static_cast<int>(gx), y0 = static_cast<int>(gy);
    const int x1 = std::min(x0 + 1, size - 1), y1 = std::min(y0 + 1, size - 1);
    const double fx = gx - x0, fy = gy - y0;
    Bilinear b;
    b.texel = {static_cast<std::size_t>(y0) * size + x0, static_cast<std::size_t>(y0) * size + x1,
               static_cast<std::size_t>(y1) * size + x0, static_cast<std::size_t>(y1) * size + x1};
    b.w = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    return b;
}

struct SeamSample {
    Bilinear side[2];
};

std::vector<SeamSample> seam_samples(const SeamEdgeList& seams, int size, double samples_per_texel) {
    std::vector<SeamSample> samples;
    for (const auto& e : seams) {
        const Vec2 a0 = e.side[0].uv_a * size, b0 = e.side[0].uv_b * size;
        const Vec2 a1 = e.side[1].uv_a * size, b1 = e.side[1].uv_b * size;
        const double len = std::max(length(b0 - a0), length(b1 - a1));
        const int n = std::max(1, static_cast<int>(std::ceil(samples_per_texel * len)));
        for (int i = 0; i < n; ++i) {
            const double t = (i + 0.5) / n;
            samples.push_back({{bilinear_at(size, a0 + (b0 - a0) * t), bilinear_at(size, a1 + (b1 - a1) * t)}});
        }
    }
    return samples;
}

template <typename ValueFn>
double discontinuity(const std::vector<SeamSample>& samples, int channels, ValueFn&& value) {
    if (samples.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& s : samples) {
        for (int c = 0; c < channels; ++c) {
            double v[2] = {0.0, 0.0};
            for (int side = 0; side < 2; ++side) {
                for (int k = 0; k < 4; ++k) {
                    v[side] += s.side[side].w[k] * value(s.side[side].texel[k], c);
                }
            }
            total += std::abs(v[0] - v[1]);
        }
    }
    return total / (static_cast<double>(samples.size()) * channels);
}

}  // namespace

void sample_bilinear(const Texture& texture, Vec2 texel_pos, std::span<double> out) {
    const Bilinear b = bilinear_at(texture.size, texel_pos);
    for (int c = 0; c < texture.channels; ++c) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) {
            v += b.w[k] * texture.pixels[b.texel[k] * texture.channels + c];
        }
        out[static_cast<std::size_t>(c)] = v;
    }
}

double seam_discontinuity(const SeamEdgeList& seams, const Texture& texture, double samples_per_texel) {
    const auto samples = seam_samples(seams, texture.size, samples_per_texel);
    return discontinuity(samples, texture.channels, [&](std::size_t t, int c) {
        return static_cast<double>(texture.pixels[t * texture.channels + c]);
    });
}

Texture fix_seams(const Mesh& mesh, const SeamEdgeList& seams, const Texture& texture, const SeamSettings& settings,
                  std::vector<double>* metric_trace) {
    texture.validate();
    if (!mesh.has_uv()) {
        throw InputError("fix_seams: mesh has no UVs");
    }
    for (const auto& e : seams) {
        if (e.vertex_a >= mesh.vertices.size() || e.vertex_b >= mesh.vertices.size() ||
            e.side[0].face >= mesh.faces.size() || e.side[1].face >= mesh.faces.size()) {
            throw InputError("fix_seams: seam list does not match the mesh");
        }
    }
    if (settings.iterations < 0 || !(settings.relaxation > 0.0 && settings.relaxation <= 1.0)) {
        throw InputError("fix_seams: iterations must be >= 0 and relaxation in (0, 1]");
    }
    const int size = texture.size;
    const int channels = texture.channels;
    const std::size_t texels = texture.texel_count();
    const auto samples = seam_samples(seams, size, settings.samples_per_texel);

    // Island id per texel; corrections only spread within an island or into the gutter.
    std::vector<std::int32_t> island(texels, -1);
    {
        const auto islands = uv_islands(mesh);
        for (std::size_t c = 0; c < islands.size(); ++c) {
            for (std::uint32_t f : islands[c].faces) {
                const Face& face = mesh.faces[f];
                const std::array<Vec2, 3> tri = {mesh.uv[face[0]] * size, mesh.uv[face[1]] * size,
                                                 mesh.uv[face[2]] * size};
                detail::raster_triangle_2d(tri, size, [&](int x, int y, const std::array<double, 3>&) {
                    island[static_cast<std::size_t>(y) * size + x] = static_cast<std::int32_t>(c);
                });
            }
        }
    }

    std::vector<double> offset(texels * channels, 0.0);
    std::vector<int> ring(texels, -1);
    std::vector<std::size_t> seam_texels;
    for (const auto& s : samples) {
        for (const auto& side : s.side) {
            for (int k = 0; k < 4; ++k) {
                if (side.w[k] > 0.0 && ring[side.texel[k]] != 0) {
                    ring[side.texel[k]] = 0;
                    seam_texels.push_back(side.texel[k]);
                }
            }
        }
    }
    std::sort(seam_texels.begin(), seam_texels.end());

    auto value = [&](std::size_t t, int c) {
        return std::clamp(static_cast<double>(texture.pixels[t * channels + c]) + offset[t * channels + c], 0.0, 1.0);
    };
    if (metric_trace != nullptr) {
        metric_trace->assign(1, discontinuity(samples, channels, value));
    }

    std::vector<double> acc(texels * channels, 0.0);
    std::vector<double> acc_w(texels, 0.0);
    std::vector<std::vector<std::size_t>> rings(1, seam_texels);
    const int max_ring = settings.iterations;

    for (int iter = 1; iter <= settings.iterations; ++iter) {
        for (std::size_t t : seam_texels) {
            acc_w[t] = 0.0;
            std::fill_n(acc.begin() + static_cast<std::ptrdiff_t>(t * channels), channels, 0.0);
        }
        for (const auto& s : samples) {
            for (int c = 0; c < channels; ++c) {
                double v[2] = {0.0, 0.0};
                for (int side = 0; side < 2; ++side) {
                    for (int k = 0; k < 4; ++k) {
                        v[side] += s.side[side].w[k] * value(s.side[side].texel[k], c);
                    }
                }
                const double correction = 0.5 * settings.relaxation * (v[1] - v[0]);
                for (int side = 0; side < 2; ++side) {
                    const double signed_corr = side == 0 ? correction : -correction;
                    for (int k = 0; k < 4; ++k) {
                        acc[s.side[side].texel[k] * channels + c] += s.side[side].w[k] * signed_corr;
                    }
                }
            }
            for (const auto& side : s.side) {
                for (int k = 0; k < 4; ++k) {
                    acc_w[side.texel[k]] += side.w[k];
                }
            }
        }
        for (std::size_t t : seam_texels) {
            if (acc_w[t] > 0.0) {
                for (int c = 0; c < channels; ++c) {
                    offset[t * channels + c] += acc[t * channels + c] / acc_w[t];
                }
            }
        }

        // Grow one ring inwards.
        if (iter <= max_ring) {
            std::vector<std::size_t> next;
            for (std::size_t t : rings.back()) {
                const int x = static_cast<int>(t % size), y = static_cast<int>(t / size);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= size || ny >= size) {
                            continue;
                        }
                        const std::size_t n = static_cast<std::size_t>(ny) * size + nx;
                        if (ring[n] != -1) {
                            continue;
                        }
                        if (island[n] != -1 && island[t] != -1 && island[n] != island[t]) {
                            continue;
                        }
                        ring[n] = iter;
                        next.push_back(n);
                    }
                }
            }
            std::sort(next.begin(), next.end());
            rings.push_back(std::move(next));
        }

        // Re-blend every ring from its inner neighbours with linear falloff.
        for (std::size_t r = 1; r < rings.size(); ++r) {
            const double falloff = static_cast<double>(max_ring + 1 - static_cast<int>(r)) /
                                   static_cast<double>(max_ring + 2 - static_cast<int>(r));
            for (std::size_t t : rings[r]) {
                const int x = static_cast<int>(t % size), y = static_cast<int>(t / size);
                std::vector<double> sum(static_cast<std::size_t>(channels), 0.0);
                int n = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= size || ny >= size) {
                            continue;
                        }
                        const std::size_t nb = static_cast<std::size_t>(ny) * size + nx;
                        if (ring[nb] != static_cast<int>(r) - 1) {
                            continue;
                        }
                        ++n;
                        for (int c = 0; c < channels; ++c) {
                            sum[static_cast<std::size_t>(c)] += offset[nb * channels + c];
                        }
                    }
                }
                for (int c = 0; c < channels; ++c) {
                    offset[t * channels + c] = n > 0 ? falloff * sum[static_cast<std::size_t>(c)] / n : 0.0;
                }
            }
        }
        if (metric_trace != nullptr) {
            metric_trace->push_back(discontinuity(samples, channels, value));
        }
    }

    Texture out = texture;
    for (std::size_t t = 0; t < texels; ++t) {
        if (ring[t] < 0) {
            continue;
        }
        for (int c = 0; c < channels; ++c) {
            out.pixels[t * channels + c] = static_cast<float>(value(t, c));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Upscaling

double lanczos3(double x) {
    constexpr double kPi = std::numbers::pi;
    const double ax = std::abs(x);
    if (ax < 1e-12) {
        return 1.0;
    }
    if (ax >= 3.0) {
        return 0.0;
    }
    const double px = kPi * x;
    return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

Texture upscale(const Texture& texture, int factor) {
    texture.validate();
    if (factor != 2 && factor != 4) {
        throw InputError("upscale: factor must be 2 or 4, got " + std::to_string(factor));
    }
    if (static_cast<long>(texture.size) * factor > 4096) {
        throw InputError("upscale: output would exceed 4096x4096");
    }
    const int src = texture.size;
    const int dst = src * factor;
    const int channels = texture.channels;

    struct Taps {
        int first;
        std::array<double, 6> w;
    };
    std::vector<Taps> taps(static_cast<std::size_t>(dst));
    for (int i = 0; i < dst; ++i) {
        const double x = (i + 0.5) / factor - 0.5;
        const int first = static_cast<int>(std::floor(x)) - 2;
        Taps t{first, {}};
        double sum = 0.0;
        for (int k = 0; k < 6; ++k) {
            t.w[static_cast<std::size_t>(k)] = lanczos3(x - (first + k));
            sum += t.w[static_cast<std::size_t>(k)];
        }
        for (auto& w : t.w) {
            w /= sum;
        }
        taps[static_cast<std::size_t>(i)] = t;
    }
    auto clamp_index = [&](int j) { return std::clamp(j, 0, src - 1); };

    // Horizontal pass: src rows × dst columns.
    std::vector<float> horizontal(static_cast<std::size_t>(src) * dst * channels);
    for (int y = 0; y < src; ++y) {
        for (int x = 0; x < dst; ++x) {
            const Taps& t = taps[static_cast<std::size_t>(x)];
            for (int c = 0; c < channels; ++c) {
                double v = 0.0;
                for (int k = 0; k < 6; ++k) {
                    const std::size_t si = (static_cast<std::size_t>(y) * src + clamp_index(t.first + k)) * channels + c;
                    v += t.w[static_cast<std::size_t>(k)] * texture.pixels[si];
                }
                horizontal[(static_cast<std::size_t>(y) * dst + x) * channels + c] = static_cast<float>(v);
            }
        }
    }

    Texture out(dst, channels);
    for (int y = 0; y < dst; ++y) {
        const Taps& t = taps[static_cast<std::size_t>(y)];
        for (int x = 0; x < dst; ++x) {
            for (int c = 0; c < channels; ++c) {
                double v = 0.0;
                for (int k = 0; k < 6; ++k) {
                    const std::size_t hi = (static_cast<std::size_t>(clamp_index(t.first + k)) * dst + x) * channels + c;
                    v += t.w[static_cast<std::size_t>(k)] * horizontal[hi];
                }
                out.pixels[(static_cast<std::size_t>(y) * dst + x) * channels + c] = static_cast<float>(v);
            }
        }
    }
    auto nearest = [&](const auto& buf, auto& dst_buf) {
        if (buf.empty()) {
            return;
        }
        dst_buf.resize(static_cast<std::size_t>(dst) * dst);
        for (int y = 0; y < dst; ++y) {
            for (int x = 0; x < dst; ++x) {
                dst_buf[static_cast<std::size_t>(y) * dst + x] =
                    buf[static_cast<std::size_t>(y / factor) * src + x / factor];
            }
        }
    };
    nearest(texture.coverage, out.coverage);
    nearest(texture.footprint, out.footprint);
    nearest(texture.confidence, out.confidence);
    return out;
}

}  // namespace gen3d

#include "gen3d/materials.hpp"

#include <algorithm>
#include <cmath>

#include "gen3d/error.hpp"
#include "gen3d/texture.hpp"

namespace gen3d {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

float lerpf(float a, float b, float t) { return a + (b - a) * t; }

}  // namespace

PBRTextureSet PBRTextureSet::constant(int l, Vec3 albedo, double roughness, double metalness) {
    PBRTextureSet set(l);
    for (std::size_t i = 0; i < set.roughness.size(); ++i) {
        set.albedo[3 * i + 0] = static_cast<float>(albedo.x);
        set.albedo[3 * i + 1] = static_cast<float>(albedo.y);
        set.albedo[3 * i + 2] = static_cast<float>(albedo.z);
        set.roughness[i] = static_cast<float>(roughness);
        set.metalness[i] = static_cast<float>(metalness);
    }
    return set;
}

Vec3 shade(const MaterialSample& material, const Vec3& normal, const Vec3& view_dir, const LightConfig& light) {
    const Vec3 albedo{clamp01(material.albedo.x), clamp01(material.albedo.y), clamp01(material.albedo.z)};
    const double roughness = clamp01(material.roughness);
    const double metalness = clamp01(material.metalness);

    const double n_l = clamp01(dot(normal, light.direction));
    const double n_v = clamp01(dot(normal, view_dir));
    const Vec3 h = normalize(light.direction + view_dir);
    const double n_h = clamp01(dot(normal, h));
    const double v_h = clamp01(dot(view_dir, h));

    const double alpha = std::max(roughness * roughness, 1e-3);
    const double a2 = alpha * alpha;
    const double d_denom = n_h * n_h * (a2 - 1.0) + 1.0;
    const double distribution = a2 / (kPi * d_denom * d_denom);
    const double vis_denom =
        n_l * std::sqrt(n_v * n_v * (1.0 - a2) + a2) + n_v * std::sqrt(n_l * n_l * (1.0 - a2) + a2);
    const double visibility = vis_denom > 0.0 ? 0.5 / vis_denom : 0.0;
    const double fresnel_weight = std::pow(1.0 - v_h, 5.0);

    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        const double a = albedo[c];
        const double f0 = 0.04 + (a - 0.04) * metalness;
        const double fresnel = f0 + (1.0 - f0) * fresnel_weight;
        const double diffuse = a * (1.0 - metalness) * n_l;
        const double specular = kPi * distribution * visibility * fresnel * n_l;
        const double lit = light.ambient[c] * a + light.intensity[c] * std::min(1.0, diffuse + specular);
        (c == 0 ? out.x : (c == 1 ? out.y : out.z)) = clamp01(lit);
    }
    return out;
}

PBRTextureSet split_channels(const Texture& texture) {
    if (texture.channels != 5) {
        throw InputError("split_channels requires a 5-channel texture, got " + std::to_string(texture.channels));
    }
    PBRTextureSet set(texture.size);
    for (std::size_t i = 0; i < texture.texel_count(); ++i) {
        const float* t = texture.texel(i);
        for (int c = 0; c < 3; ++c) {
            set.albedo[3 * i + c] = std::clamp(t[c], 0.0f, 1.0f);
        }
        set.roughness[i] = std::clamp(t[3], 0.0f, 1.0f);
        set.metalness[i] = std::clamp(t[4], 0.0f, 1.0f);
    }
    return set;
}

Texture interleave_channels(const PBRTextureSet& set) {
    Texture t(set.size, 5);
    for (std::size_t i = 0; i < t.texel_count(); ++i) {
        float* dst = t.texel(i);
        dst[0] = set.albedo[3 * i];
        dst[1] = set.albedo[3 * i + 1];
        dst[2] = set.albedo[3 * i + 2];
        dst[3] = set.roughness[i];
        dst[4] = set.metalness[i];
    }
    std::fill(t.coverage.begin(), t.coverage.end(), 1);
    return t;
}

MaterialSample sample_material(const PBRTextureSet& set, const Vec2& uv) {
    const int l = set.size;
    const double gx = std::clamp(uv.x * l - 0.5, 0.0, static_cast<double>(l - 1));
    const double gy = std::clamp(uv.y * l - 0.5, 0.0, static_cast<double>(l - 1));
    const int x0 = std::min(static_cast<int>(gx), l - 1);
    const int y0 = std::min(static_cast<int>(gy), l - 1);
    const int x1 = std::min(x0 + 1, l - 1);
    const int y1 = std::min(y0 + 1, l - 1);
    const auto fx = static_cast<float>(gx - x0);
    const auto fy = static_cast<float>(gy - y0);
    const std::size_t i00 = static_cast<std::size_t>(y0) * l + x0, i10 = static_cast<std::size_t>(y0) * l + x1,
                      i01 = static_cast<std::size_t>(y1) * l + x0, i11 = static_cast<std::size_t>(y1) * l + x1;
    // Nested lerps return the input exactly when all four texels agree.
    auto bilerp = [&](const std::vector<float>& buf, int stride, int c) {
        const float top = lerpf(buf[i00 * stride + c], buf[i10 * stride + c], fx);
        const float bottom = lerpf(buf[i01 * stride + c], buf[i11 * stride + c], fx);
        return static_cast<double>(lerpf(top, bottom, fy));
    };
    MaterialSample m;
    m.albedo = {bilerp(set.albedo, 3, 0), bilerp(set.albedo, 3, 1), bilerp(set.albedo, 3, 2)};
    m.roughness = bilerp(set.roughness, 1, 0);
    m.metalness = bilerp(set.metalness, 1, 0);
    return m;
}

}  // namespace gen3d

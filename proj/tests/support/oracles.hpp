#pragma once

// Independent reference computations used by the tests. Nothing here calls into the
// library code it checks; each helper restates the math directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "gen3d/mesh.hpp"
#include "gen3d/texture.hpp"

namespace oracle {

using gen3d::Face;
using gen3d::Mesh;
using gen3d::Vec2;
using gen3d::Vec3;

inline std::filesystem::path data_dir() { return GEN3D_TEST_DATA_DIR; }

/// Fresh scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gen3d_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- analytic shapes --------------------------------------------------------------------

inline double sphere_sdf(const Vec3& p, double r) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z) - r; }

/// Torus around the y axis.
inline double torus_sdf(const Vec3& p, double major, double minor) {
    const double q = std::sqrt(p.x * p.x + p.z * p.z) - major;
    return std::sqrt(q * q + p.y * p.y) - minor;
}

/// Entry distance of a ray into an axis-aligned box (slab method); negative when missed.
inline double ray_box(const Vec3& origin, const Vec3& dir, const Vec3& lo, const Vec3& hi) {
    double t0 = -1e300, t1 = 1e300;
    for (int a = 0; a < 3; ++a) {
        const double o = origin[a], d = dir[a];
        if (std::abs(d) < 1e-15) {
            if (o < lo[a] || o > hi[a]) {
                return -1.0;
            }
            continue;
        }
        double ta = (lo[a] - o) / d, tb = (hi[a] - o) / d;
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t0 <= t1 ? t0 : -1.0;
}

// --- topology ----------------------------------------------------------------------------

/// Vertex ids merged by exact position (std::map, no hashing shortcuts).
inline std::vector<std::size_t> merge_by_position(const Mesh& m) {
    std::map<std::tuple<double, double, double>, std::size_t> ids;
    std::vector<std::size_t> out(m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const auto& v = m.vertices[i];
        out[i] = ids.emplace(std::make_tuple(v.x, v.y, v.z), ids.size()).first->second;
    }
    return out;
}

/// Undirected edge -> incident face count, positions merged.
inline std::map<std::pair<std::size_t, std::size_t>, int> edge_incidence(const Mesh& m) {
    const auto id = merge_by_position(m);
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const Face& f : m.faces) {
        for (int k = 0; k < 3; ++k) {
            std::size_t a = id[f[k]], b = id[f[(k + 1) % 3]];
            if (a > b) {
                std::swap(a, b);
            }
            ++edges[{a, b}];
        }
    }
    return edges;
}

/// V − E + F after merging vertices by position.
inline long euler_characteristic(const Mesh& m) {
    const auto id = merge_by_position(m);
    std::set<std::size_t> used(id.begin(), id.end());
    return static_cast<long>(used.size()) - static_cast<long>(edge_incidence(m).size()) +
           static_cast<long>(m.faces.size());
}

inline double signed_volume(const Mesh& m) {
    double v = 0.0;
    for (const Face& f : m.faces) {
        const Vec3 &a = m.vertices[f[0]], &b = m.vertices[f[1]], &c = m.vertices[f[2]];
        v += (a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)) / 6.0;
    }
    return v;
}

// --- resampling --------------------------------------------------------------------------

inline double lanczos3(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    if (std::abs(x) >= 3.0) {
        return 0.0;
    }
    const double px = M_PI * x;
    return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

inline double trilinear(const std::array<double, 8>& c, double fx, double fy, double fz) {
    // c indexed as x + 2y + 4z
    const double x00 = c[0] + (c[1] - c[0]) * fx, x10 = c[2] + (c[3] - c[2]) * fx;
    const double x01 = c[4] + (c[5] - c[4]) * fx, x11 = c[6] + (c[7] - c[6]) * fx;
    const double y0 = x00 + (x10 - x00) * fy, y1 = x01 + (x11 - x01) * fy;
    return y0 + (y1 - y0) * fz;
}

/// Bilinear texel lookup with texel centers at i + 0.5, clamped to the edge.
inline double bilinear(const std::vector<float>& px, int size, int channels, int c, double x, double y) {
    x = std::clamp(x - 0.5, 0.0, size - 1.0);
    y = std::clamp(y - 0.5, 0.0, size - 1.0);
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, size - 1), y1 = std::min(y0 + 1, size - 1);
    const double fx = x - x0, fy = y - y0;
    auto at = [&](int xx, int yy) { return static_cast<double>(px[(static_cast<std::size_t>(yy) * size + xx) * channels + c]); };
    return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x1, y0)) + fy * ((1 - fx) * at(x0, y1) + fx * at(x1, y1));
}

// --- texture fusion ----------------------------------------------------------------------

/// Σ c_k·T_k / Σ c_k over partials with c_k ≥ floor, taken texel by texel in view-index order.
/// Returns NaN for texels without an accepted sample.
inline std::vector<float> fuse_brute_force(const std::vector<gen3d::PartialTexture>& partials, double floor) {
    std::vector<const gen3d::PartialTexture*> sorted;
    for (const auto& p : partials) {
        sorted.push_back(&p);
    }
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->view_index < b->view_index; });
    const int size = partials[0].size, channels = partials[0].channels;
    std::vector<float> out(static_cast<std::size_t>(size) * size * channels, std::nanf(""));
    for (std::size_t t = 0; t < static_cast<std::size_t>(size) * size; ++t) {
        for (int c = 0; c < channels; ++c) {
            double num = 0.0, den = 0.0;
            for (auto* p : sorted) {
                const float w = p->confidence[t];
                if (w > 0.0f && w >= floor) {
                    num += static_cast<double>(w) * p->pixels[t * channels + c];
                    den += w;
                }
            }
            if (den > 0.0) {
                out[t * channels + c] = static_cast<float>(num / den);
            }
        }
    }
    return out;
}

// --- seams -------------------------------------------------------------------------------

/// Mean |Δ| between the two UV images of each seam edge, sampled at `per_texel` points per
/// texel of edge length, over all channels.
inline double seam_metric(const gen3d::SeamEdgeList& seams, const gen3d::Texture& tex, double per_texel = 2.0) {
    double total = 0.0;
    std::size_t n_total = 0;
    for (const auto& e : seams) {
        const Vec2 a0 = e.side[0].uv_a * tex.size, b0 = e.side[0].uv_b * tex.size;
        const Vec2 a1 = e.side[1].uv_a * tex.size, b1 = e.side[1].uv_b * tex.size;
        const double len = std::max(std::hypot(b0.x - a0.x, b0.y - a0.y), std::hypot(b1.x - a1.x, b1.y - a1.y));
        const int n = std::max(1, static_cast<int>(std::ceil(per_texel * len)));
        for (int i = 0; i < n; ++i) {
            const double t = (i + 0.5) / n;
            for (int c = 0; c < tex.channels; ++c) {
                const double v0 = bilinear(tex.pixels, tex.size, tex.channels, c, a0.x + (b0.x - a0.x) * t,
                                           a0.y + (b0.y - a0.y) * t);
                const double v1 = bilinear(tex.pixels, tex.size, tex.channels, c, a1.x + (b1.x - a1.x) * t,
                                           a1.y + (b1.y - a1.y) * t);
                total += std::abs(v0 - v1);
                ++n_total;
            }
        }
    }
    return n_total ? total / static_cast<double>(n_total) : 0.0;
}

// --- shading -----------------------------------------------------------------------------

/// Straight transcription of the documented shading formula.
inline Vec3 shade_formula(const Vec3& albedo, double roughness, double metalness, const Vec3& n, const Vec3& v,
                          const Vec3& l, const Vec3& light, const Vec3& ambient) {
    auto d3 = [](const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; };
    const double nl = std::clamp(d3(n, l), 0.0, 1.0), nv = std::clamp(d3(n, v), 0.0, 1.0);
    Vec3 h = l + v;
    const double hl = std::sqrt(d3(h, h));
    h = hl > 0 ? h / hl : Vec3{};
    const double nh = std::clamp(d3(n, h), 0.0, 1.0), vh = std::clamp(d3(v, h), 0.0, 1.0);
    const double a = std::max(roughness * roughness, 1e-3), a2 = a * a;
    const double denom = nh * nh * (a2 - 1.0) + 1.0;
    const double D = a2 / (M_PI * denom * denom);
    const double vis_den = nl * std::sqrt(nv * nv * (1 - a2) + a2) + nv * std::sqrt(nl * nl * (1 - a2) + a2);
    const double V = vis_den > 0 ? 0.5 / vis_den : 0.0;
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        const double alb = albedo[c];
        const double f0 = 0.04 + (alb - 0.04) * metalness;
        const double F = f0 + (1 - f0) * std::pow(1 - vh, 5);
        const double diffuse = alb * (1 - metalness) * nl;
        const double spec = M_PI * D * V * F * nl;
        const double lit = light[c] * std::min(1.0, diffuse + spec);
        const double val = std::clamp(ambient[c] * alb + lit, 0.0, 1.0);
        (c == 0 ? out.x : c == 1 ? out.y : out.z) = val;
    }
    return out;
}

// --- GLB ---------------------------------------------------------------------------------

struct GlbSummary {
    nlohmann::json json;
    std::vector<std::uint8_t> bin;
    std::size_t triangle_count = 0;
    std::size_t vertex_count = 0;
};

/// Minimal GLB reader: header, JSON chunk, BIN chunk; counts from the accessors.
inline GlbSummary parse_glb(const std::vector<std::uint8_t>& bytes) {
    auto u32 = [&](std::size_t off) {
        return static_cast<std::uint32_t>(bytes.at(off)) | static_cast<std::uint32_t>(bytes.at(off + 1)) << 8 |
               static_cast<std::uint32_t>(bytes.at(off + 2)) << 16 | static_cast<std::uint32_t>(bytes.at(off + 3)) << 24;
    };
    if (u32(0) != 0x46546C67u || u32(4) != 2 || u32(8) != bytes.size()) {
        throw std::runtime_error("not a GLB v2 file");
    }
    GlbSummary s;
    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const std::uint32_t len = u32(off), type = u32(off + 4);
        const auto* begin = bytes.data() + off + 8;
        if (type == 0x4E4F534Au) {
            s.json = nlohmann::json::parse(std::string(reinterpret_cast<const char*>(begin), len));
        } else if (type == 0x004E4942u) {
            s.bin.assign(begin, begin + len);
        }
        off += 8 + len;
    }
    const auto& prim = s.json.at("meshes").at(0).at("primitives").at(0);
    s.triangle_count = s.json["accessors"][prim.at("indices").get<int>()]["count"].get<std::size_t>() / 3;
    s.vertex_count = s.json["accessors"][prim["attributes"]["POSITION"].get<int>()]["count"].get<std::size_t>();
    return s;
}

/// Runs the third-party glTF validator on a file. Returns the process exit status, or -1
/// when the validator is not installed.
inline int run_gltf_validator(const std::filesystem::path& glb, std::string* output = nullptr) {
    const std::filesystem::path oracle_dir = GEN3D_ORACLE_DIR;
    if (!std::filesystem::exists(oracle_dir / "node_modules" / "gltf-validator")) {
        return -1;
    }
    const auto log = glb.string() + ".validator.txt";
    const std::string cmd = std::string(GEN3D_NODE_EXECUTABLE) + " \"" + (oracle_dir / "validate_gltf.mjs").string() +
                            "\" \"" + glb.string() + "\" > \"" + log + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(log);
        *output = std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : 2;
}

}  // namespace oracle

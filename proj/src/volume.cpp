#include "gen3d/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "gen3d/error.hpp"
#include "gen3d/image.hpp"
#include "gen3d/parallel.hpp"
#include "mc_tables.hpp"

namespace gen3d {

SDFGrid SDFGrid::unit_cube(int resolution, double truncation_cells) {
    if (resolution < 8) {
        throw InputError("SDF grid resolution must be at least 8");
    }
    if (!(truncation_cells > 0.0)) {
        throw InputError("SDF truncation must be positive");
    }
    SDFGrid g;
    g.resolution = resolution;
    // Unit cube plus two cells of padding on every side: (res - 1) cells = 1 + 4 cells.
    g.cell = 1.0 / (resolution - 5);
    g.origin = Vec3{-0.5, -0.5, -0.5} - Vec3{2.0, 2.0, 2.0} * g.cell;
    g.truncation = truncation_cells * g.cell;
    const std::size_t n = static_cast<std::size_t>(resolution) * resolution * resolution;
    g.values.assign(n, static_cast<float>(g.truncation));
    g.weights.assign(n, 0.0f);
    return g;
}

// Two 1D lower-envelope passes (Felzenszwalb and Huttenlocher).
std::vector<float> silhouette_distance(const RenderedView& view) {
    const int n = view.resolution;
    constexpr double kInf = 1e20;
    std::vector<double> f(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = view.mask[i] != 0 ? 0.0 : kInf;
    }
    std::vector<double> src(n), dst(n), z(n + 1);
    std::vector<int> v(n);
    auto transform_line = [&] {
        int k = 0;
        v[0] = 0;
        z[0] = -kInf;
        z[1] = kInf;
        for (int q = 1; q < n; ++q) {
            if (src[q] >= kInf) {
                continue;
            }
            if (src[v[0]] >= kInf) {
                v[0] = q;
                continue;
            }
            double s = 0.0;
            while (true) {
                const int p = v[k];
                s = ((src[q] + 1.0 * q * q) - (src[p] + 1.0 * p * p)) / (2.0 * q - 2.0 * p);
                if (s > z[k] || k == 0) {
                    break;
                }
                --k;
            }
            if (s <= z[k]) {
                v[k] = q;  // k == 0: q dominates the whole line so far
                continue;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = kInf;
        }
        k = 0;
        for (int q = 0; q < n; ++q) {
            while (z[k + 1] < q) {
                ++k;
            }
            const int p = v[k];
            dst[q] = src[p] >= kInf ? kInf : (q - p) * static_cast<double>(q - p) + src[p];
        }
    };
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            src[x] = f[static_cast<std::size_t>(y) * n + x];
        }
        transform_line();
        for (int x = 0; x < n; ++x) {
            f[static_cast<std::size_t>(y) * n + x] = dst[x];
        }
    }
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            src[y] = f[static_cast<std::size_t>(y) * n + x];
        }
        transform_line();
        for (int y = 0; y < n; ++y) {
            f[static_cast<std::size_t>(y) * n + x] = dst[y];
        }
    }
    std::vector<float> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = f[i] >= kInf ? std::numeric_limits<float>::infinity() : static_cast<float>(std::sqrt(f[i]));
    }
    return out;
}

SDFGrid fuse_views_to_sdf(std::span<const RenderedView> views, std::span<const Camera> cameras,
                          const FusionSettings& settings) {
    if (views.size() != cameras.size()) {
        throw InputError("fuse_views_to_sdf: " + std::to_string(views.size()) + " views but " +
                         std::to_string(cameras.size()) + " cameras");
    }
    if (views.size() < 2) {
        throw InputError("fuse_views_to_sdf: at least 2 views are required");
    }
    for (std::size_t v = 0; v < views.size(); ++v) {
        cameras[v].validate();
        const auto px = static_cast<std::size_t>(cameras[v].resolution) * cameras[v].resolution;
        if (views[v].resolution != cameras[v].resolution || views[v].mask.size() != px ||
            views[v].depth.data.size() != px) {
            throw InputError("fuse_views_to_sdf: view " + std::to_string(v) + " lacks depth/mask at camera resolution");
        }
    }

    std::vector<std::size_t> order(views.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double az_a = cameras[a].azimuth_deg(), az_b = cameras[b].azimuth_deg();
        if (az_a != az_b) {
            return az_a < az_b;
        }
        return cameras[a].elevation_deg() < cameras[b].elevation_deg();
    });

    std::vector<std::vector<float>> silhouette(views.size());
    parallel_for(views.size(), [&](std::size_t v) { silhouette[v] = silhouette_distance(views[v]); });

    SDFGrid grid = SDFGrid::unit_cube(settings.resolution, settings.truncation_cells);
    const double tau = grid.truncation;
    const int res = grid.resolution;
    parallel_for(static_cast<std::size_t>(res), [&](std::size_t slab) {
        const int k = static_cast<int>(slab);
        for (int j = 0; j < res; ++j) {
            for (int i = 0; i < res; ++i) {
                const Vec3 p = grid.corner(i, j, k);
                double value_sum = 0.0;
                double weight_sum = 0.0;
                int behind = 0;
                double interior_bound = tau;
                for (std::size_t v : order) {
                    const Camera& cam = cameras[v];
                    const RenderedView& view = views[v];
                    const Projection proj = project(p, cam);
                    if (!proj.in_frustum) {
                        continue;
                    }
                    const int px = static_cast<int>(proj.pixel.x);
                    const int py = static_cast<int>(proj.pixel.y);
                    if (!view.covered(px, py)) {
                        // Free space: the corner is at least as far from the surface as its
                        // ray is from the silhouette.
                        const double d = silhouette[v][static_cast<std::size_t>(py) * view.resolution + px] *
                                         pixel_world_size(cam, proj.depth);
                        value_sum += settings.carve_weight * std::min(tau, d);
                        weight_sum += settings.carve_weight;
                        continue;
                    }
                    // Interpolate the depth among pixels on the same surface as the nearest one.
                    const double nearest = view.depth.at(px, py, 0);
                    const PixelFootprint fp =
                        depth_consistent_footprint(view, proj.pixel, nearest, 3.0 * pixel_world_size(cam, nearest));
                    const double surface = fp.count > 0 ? footprint_depth(view, fp) : nearest;
                    double s = surface - proj.depth;
                    // Along the ray s overestimates the distance away from head-on views, so
                    // scale it by the cosine to the surface normal (point-to-plane).
                    const Vec3 n{view.normal.at(px, py, 0), view.normal.at(px, py, 1), view.normal.at(px, py, 2)};
                    // Views without normals (e.g. from a remote generator) keep the ray distance.
                    const double n_len = length(n);
                    const double c = n_len > 0.5 ? std::abs(dot(n, normalize(p - cam.position))) / n_len : 1.0;
                    if (s < -tau) {
                        ++behind;
                        interior_bound = std::min(interior_bound, -s * c);
                        continue;
                    }
                    s *= c;
                    value_sum += settings.observation_weight * std::min(s, tau);
                    weight_sum += settings.observation_weight;
                }
                const std::size_t idx = grid.index(i, j, k);
                if (weight_sum > 0.0) {
                    grid.values[idx] = static_cast<float>(value_sum / weight_sum);
                    grid.weights[idx] = static_cast<float>(weight_sum);
                } else if (behind > 0) {
                    // Hidden behind the surface in every view that sees it: interior.
                    grid.values[idx] = static_cast<float>(-std::min(tau, interior_bound));
                    grid.weights[idx] = static_cast<float>(settings.interior_weight * behind);
                }
            }
        }
    });
    return grid;
}

double sample_sdf(const SDFGrid& grid, const Vec3& point) {
    const Vec3 g = (point - grid.origin) / grid.cell;
    const double limit = grid.resolution - 1;
    if (!(g.x >= 0.0 && g.y >= 0.0 && g.z >= 0.0 && g.x <= limit && g.y <= limit && g.z <= limit)) {
        throw InputError("sample_sdf: point outside grid bounds");
    }
    const int i = std::min(static_cast<int>(g.x), grid.resolution - 2);
    const int j = std::min(static_cast<int>(g.y), grid.resolution - 2);
    const int k = std::min(static_cast<int>(g.z), grid.resolution - 2);
    const double fx = g.x - i, fy = g.y - j, fz = g.z - k;
    auto v = [&](int di, int dj, int dk) { return static_cast<double>(grid.values[grid.index(i + di, j + dj, k + dk)]); };
    const double c00 = v(0, 0, 0) + (v(1, 0, 0) - v(0, 0, 0)) * fx;
    const double c10 = v(0, 1, 0) + (v(1, 1, 0) - v(0, 1, 0)) * fx;
    const double c01 = v(0, 0, 1) + (v(1, 0, 1) - v(0, 0, 1)) * fx;
    const double c11 = v(0, 1, 1) + (v(1, 1, 1) - v(0, 1, 1)) * fx;
    const double c0 = c00 + (c10 - c00) * fy;
    const double c1 = c01 + (c11 - c01) * fy;
    return c0 + (c1 - c0) * fz;
}

namespace {

constexpr int kCornerOffset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                     {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace

Mesh marching_cubes(const SDFGrid& grid, double iso, double min_weight) {
    const int res = grid.resolution;
    if (res < 2 || grid.values.size() != static_cast<std::size_t>(res) * res * res) {
        throw InputError("marching_cubes: malformed grid");
    }
    if (!(iso > -grid.truncation && iso < grid.truncation)) {
        throw InputError("marching_cubes: iso level must lie strictly within (-tau, tau)");
    }
    auto value_at = [&](std::size_t idx) {
        const bool trusted = grid.weights.empty() || grid.weights[idx] >= min_weight;
        return trusted ? static_cast<double>(grid.values[idx]) : grid.truncation;
    };

    Mesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;
    for (int k = 0; k + 1 < res; ++k) {
        for (int j = 0; j + 1 < res; ++j) {
            for (int i = 0; i + 1 < res; ++i) {
                double v[8];
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    v[c] = value_at(grid.index(i + kCornerOffset[c][0], j + kCornerOffset[c][1], k + kCornerOffset[c][2]));
                    if (v[c] < iso) {
                        cube |= 1 << c;
                    }
                }
                const int edges = detail::kEdgeTable[cube];
                if (edges == 0) {
                    continue;
                }
                std::uint32_t ids[12] = {};
                for (int e = 0; e < 12; ++e) {
                    if ((edges & (1 << e)) == 0) {
                        continue;
                    }
                    int a = kEdgeCorners[e][0], b = kEdgeCorners[e][1];
                    int ga[3], gb[3];
                    for (int d = 0; d < 3; ++d) {
                        ga[d] = (d == 0 ? i : d == 1 ? j : k) + kCornerOffset[a][d];
                        gb[d] = (d == 0 ? i : d == 1 ? j : k) + kCornerOffset[b][d];
                    }
                    // Orient every edge from its lower corner so both adjacent cells interpolate identically.
                    if (ga[0] + ga[1] + ga[2] > gb[0] + gb[1] + gb[2]) {
                        std::swap(a, b);
                        std::swap(ga, gb);
                    }
                    const int axis = ga[0] != gb[0] ? 0 : (ga[1] != gb[1] ? 1 : 2);
                    const std::uint64_t key = static_cast<std::uint64_t>(grid.index(ga[0], ga[1], ga[2])) * 3 + axis;
                    auto [it, inserted] = edge_vertex.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
                    if (inserted) {
                        const double va = v[a], vb = v[b];
                        const double mu = std::clamp((iso - va) / (vb - va), 1e-6, 1.0 - 1e-6);
                        const Vec3 pa = grid.corner(ga[0], ga[1], ga[2]);
                        const Vec3 pb = grid.corner(gb[0], gb[1], gb[2]);
                        mesh.vertices.push_back(pa + (pb - pa) * mu);
                    }
                    ids[e] = it->second;
                }
                for (int t = 0; detail::kTriTable[cube][t] != -1; t += 3) {
                    // The table winds triangles clockwise seen from outside (increasing values).
                    mesh.faces.push_back({ids[detail::kTriTable[cube][t]], ids[detail::kTriTable[cube][t + 2]],
                                          ids[detail::kTriTable[cube][t + 1]]});
                }
            }
        }
    }
    if (mesh.faces.empty()) {
        throw EmptySurfaceError("marching_cubes: no surface crosses iso level " + std::to_string(iso));
    }
    mesh.normals = compute_vertex_normals(mesh);
    return mesh;
}

void dump_sdf(const SDFGrid& grid, const std::filesystem::path& stem) {
    std::vector<std::uint8_t> raw(grid.values.size() * 4);
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(grid.values[i]);
        for (int b = 0; b < 4; ++b) {
            raw[i * 4 + b] = static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff);
        }
    }
    auto raw_path = stem;
    raw_path += ".raw";
    write_file(raw_path, raw);
    const Vec3 lo = grid.bounds_min(), hi = grid.bounds_max();
    nlohmann::json meta = {{"resolution", grid.resolution},
                           {"bounds_min", {lo.x, lo.y, lo.z}},
                           {"bounds_max", {hi.x, hi.y, hi.z}},
                           {"cell", grid.cell},
                           {"truncation", grid.truncation},
                           {"layout", "float32 little-endian, x fastest, then y, then z"}};
    auto json_path = stem;
    json_path += ".json";
    write_file(json_path, meta.dump(2));
}

}  // namespace gen3d

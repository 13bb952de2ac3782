#include "gen3d/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "gen3d/error.hpp"
#include "gen3d/texture.hpp"

namespace gen3d {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Welded edge → incident faces, in increasing face order.
std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> edge_faces(const Mesh& mesh,
                                                                          const std::vector<std::uint32_t>& weld) {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> out;
    out.reserve(mesh.faces.size() * 2);
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            const auto a = weld[face[k]], b = weld[face[(k + 1) % 3]];
            if (a != b) {
                out[edge_key(a, b)].push_back(f);
            }
        }
    }
    return out;
}

void frame_from_normal(const Vec3& n, Vec3& tangent, Vec3& bitangent) {
    const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
    Vec3 helper{1.0, 0.0, 0.0};
    if (ay <= ax && ay <= az) {
        helper = {0.0, 1.0, 0.0};
    } else if (az <= ax && az <= ay) {
        helper = {0.0, 0.0, 1.0};
    }
    tangent = normalize(cross(helper, n));
    bitangent = cross(n, tangent);
}

/// Andrew's monotone chain, counter-clockwise, without collinear points.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
            --k;
        }
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

/// Rotation (radians) whose axis-aligned bounding box of `hull` has the least area. One of
/// the box sides is always collinear with a hull edge, so only edge directions are tried.
/// Ties keep the smallest angle so axis-aligned charts stay put.
double min_area_angle(const std::vector<Vec2>& hull) {
    double best_angle = 0.0, best_area = std::numeric_limits<double>::infinity();
    auto area_at = [&](double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const Vec2& p : hull) {
            const double x = p.x * c + p.y * s, y = p.y * c - p.x * s;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        return (x1 - x0) * (y1 - y0);
    };
    if (hull.size() < 3) {
        return 0.0;
    }
    best_area = area_at(0.0);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[(i + 1) % hull.size()];
        // Fold the edge direction into [0, pi/2); the box is the same under quarter turns.
        double angle = std::fmod(std::atan2(b.y - a.y, b.x - a.x) + 2.0 * std::numbers::pi, 0.5 * std::numbers::pi);
        if (angle > 0.5 * std::numbers::pi - 1e-12) {
            angle = 0.0;
        }
        const double area = area_at(angle);
        if (area < best_area * (1.0 - 1e-9) || (area <= best_area * (1.0 + 1e-9) && angle < best_angle)) {
            best_area = std::min(best_area, area);
            best_angle = angle;
        }
    }
    return best_angle;
}

constexpr double kMinChartFill = 0.55;   // projected chart area / bounding rectangle area
constexpr std::size_t kMinSplitFaces = 8;

/// Turns the chart frame in-plane to the minimum-area bounding rectangle, lays it landscape
/// and fills rect_min/rect_max. Returns the fraction of the rectangle covered by the chart.
double fit_rectangle(Chart& chart, const Mesh& mesh) {
    std::vector<Vec2> projected;
    for (std::uint32_t f : chart.faces) {
        for (std::uint32_t v : mesh.faces[f]) {
            const Vec3& p = mesh.vertices[v];
            projected.push_back({dot(p, chart.tangent), dot(p, chart.bitangent)});
        }
    }
    const double angle = min_area_angle(convex_hull(std::move(projected)));
    const double c = std::cos(angle), s = std::sin(angle);
    Vec3 t = chart.tangent * c + chart.bitangent * s;
    Vec3 b = chart.bitangent * c - chart.tangent * s;

    auto bounds = [&](const Vec3& u, const Vec3& w, Vec2& lo, Vec2& hi) {
        lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        hi = {-lo.x, -lo.y};
        for (std::uint32_t f : chart.faces) {
            for (std::uint32_t v : mesh.faces[f]) {
                const Vec3& p = mesh.vertices[v];
                const double x = dot(p, u), y = dot(p, w);
                lo = {std::min(lo.x, x), std::min(lo.y, y)};
                hi = {std::max(hi.x, x), std::max(hi.y, y)};
            }
        }
    };
    Vec2 lo, hi;
    bounds(t, b, lo, hi);
    if (hi.y - lo.y > hi.x - lo.x) {
        // Quarter turn (t, b) -> (b, -t) keeps the frame right-handed.
        const Vec3 turned = b;
        b = -t;
        t = turned;
        bounds(t, b, lo, hi);
    }
    chart.tangent = t;
    chart.bitangent = b;
    chart.rect_min = lo;
    chart.rect_max = hi;

    double area = 0.0;
    for (std::uint32_t f : chart.faces) {
        const Face& face = mesh.faces[f];
        const Vec3 e1 = mesh.vertices[face[1]] - mesh.vertices[face[0]];
        const Vec3 e2 = mesh.vertices[face[2]] - mesh.vertices[face[0]];
        area += 0.5 * std::abs(dot(e1, t) * dot(e2, b) - dot(e1, b) * dot(e2, t));
    }
    const double box = (hi.x - lo.x) * (hi.y - lo.y);
    return box > 0.0 ? area / box : 1.0;
}

/// Cuts a fitted chart at the median face centroid along its long side and returns the
/// edge-connected pieces, each keeping the parent's normal and frame.
std::vector<Chart> split_chart(const Chart& chart, const Mesh& mesh, const std::vector<std::uint32_t>& weld,
                               const std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>& adjacency) {
    std::vector<std::pair<double, std::uint32_t>> keyed;
    for (std::uint32_t f : chart.faces) {
        const Face& face = mesh.faces[f];
        const Vec3 centroid = (mesh.vertices[face[0]] + mesh.vertices[face[1]] + mesh.vertices[face[2]]) / 3.0;
        keyed.push_back({dot(centroid, chart.tangent), f});
    }
    std::sort(keyed.begin(), keyed.end());
    std::unordered_map<std::uint32_t, int> side;
    for (std::size_t i = 0; i < keyed.size(); ++i) {
        side[keyed[i].second] = i < keyed.size() / 2 ? 0 : 1;
    }

    std::vector<Chart> pieces;
    std::unordered_map<std::uint32_t, bool> seen;
    std::vector<std::uint32_t> ordered(chart.faces);
    std::sort(ordered.begin(), ordered.end());
    for (std::uint32_t seed : ordered) {
        if (seen[seed]) {
            continue;
        }
        Chart piece;
        piece.normal = chart.normal;
        piece.tangent = chart.tangent;
        piece.bitangent = chart.bitangent;
        std::deque<std::uint32_t> queue{seed};
        seen[seed] = true;
        while (!queue.empty()) {
            const std::uint32_t f = queue.front();
            queue.pop_front();
            piece.faces.push_back(f);
            const Face& face = mesh.faces[f];
            for (int k = 0; k < 3; ++k) {
                const auto a = weld[face[k]], b = weld[face[(k + 1) % 3]];
                if (a == b) {
                    continue;
                }
                for (std::uint32_t g : adjacency.at(edge_key(a, b))) {
                    auto it = side.find(g);
                    if (it != side.end() && it->second == side[f] && !seen[g]) {
                        seen[g] = true;
                        queue.push_back(g);
                    }
                }
            }
        }
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

struct RectSize {
    std::size_t chart;
    int w;
    int h;
};

/// Decreasing-height shelf packing. Returns false if the rectangles do not fit.
bool shelf_pack(std::vector<RectSize> rects, int resolution, int padding, std::vector<std::array<int, 2>>& placement) {
    std::stable_sort(rects.begin(), rects.end(), [](const RectSize& a, const RectSize& b) {
        if (a.h != b.h) {
            return a.h > b.h;
        }
        if (a.w != b.w) {
            return a.w > b.w;
        }
        return a.chart < b.chart;
    });
    placement.assign(rects.size(), {0, 0});
    const int margin = padding;
    int x = margin, y = margin, shelf_h = 0;
    for (const auto& r : rects) {
        if (r.w > resolution - 2 * margin) {
            return false;
        }
        if (x + r.w > resolution - margin) {
            y += shelf_h + padding;
            x = margin;
            shelf_h = 0;
        }
        placement[r.chart] = {x, y};
        x += r.w + padding;
        shelf_h = std::max(shelf_h, r.h);
        if (y + shelf_h > resolution - margin) {
            return false;
        }
    }
    return true;
}

}  // namespace

AtlasResult generate_atlas(const Mesh& input, const AtlasSettings& settings) {
    if (input.empty()) {
        throw InputError("generate_atlas: mesh has no faces");
    }
    if (!(settings.theta_max_deg > 0.0 && settings.theta_max_deg < 90.0)) {
        throw InputError("generate_atlas: theta_max must lie in (0, 90) degrees");
    }
    if (settings.padding < 0) {
        throw InputError("generate_atlas: padding must be non-negative");
    }
    const std::size_t face_count = input.faces.size();
    const auto weld = weld_positions(input);
    const auto adjacency = edge_faces(input, weld);

    std::vector<Vec3> normals(face_count);
    std::vector<double> areas(face_count);
    for (std::size_t f = 0; f < face_count; ++f) {
        normals[f] = face_normal(input, f);
        areas[f] = face_area(input, f);
    }

    std::vector<std::uint32_t> seed_order(face_count);
    std::iota(seed_order.begin(), seed_order.end(), 0u);
    std::stable_sort(seed_order.begin(), seed_order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return areas[a] > areas[b]; });

    const double cos_max = std::cos(radians(settings.theta_max_deg));
    constexpr std::uint32_t kUnassigned = ~0u;
    AtlasResult result;
    result.face_chart.assign(face_count, kUnassigned);

    for (std::uint32_t seed : seed_order) {
        if (result.face_chart[seed] != kUnassigned) {
            continue;
        }
        const auto chart_id = static_cast<std::uint32_t>(result.charts.size());
        Chart chart;
        chart.normal = normals[seed] == Vec3{} ? Vec3{0.0, 0.0, 1.0} : normals[seed];
        frame_from_normal(chart.normal, chart.tangent, chart.bitangent);

        std::deque<std::uint32_t> queue{seed};
        result.face_chart[seed] = chart_id;
        while (!queue.empty()) {
            const std::uint32_t f = queue.front();
            queue.pop_front();
            chart.faces.push_back(f);
            const Face& face = input.faces[f];
            std::vector<std::uint32_t> neighbours;
            for (int k = 0; k < 3; ++k) {
                const auto a = weld[face[k]], b = weld[face[(k + 1) % 3]];
                if (a == b) {
                    continue;
                }
                for (std::uint32_t g : adjacency.at(edge_key(a, b))) {
                    if (g != f) {
                        neighbours.push_back(g);
                    }
                }
            }
            std::sort(neighbours.begin(), neighbours.end());
            for (std::uint32_t g : neighbours) {
                if (result.face_chart[g] != kUnassigned) {
                    continue;
                }
                // Zero-area faces have no normal and join whichever chart reaches them first.
                const bool degenerate = areas[g] < kDegenerateArea;
                if (degenerate || dot(normals[g], chart.normal) >= cos_max) {
                    result.face_chart[g] = chart_id;
                    queue.push_back(g);
                }
            }
        }
        result.charts.push_back(std::move(chart));
    }

    // Crescent-shaped charts waste most of their rectangle; cut them in two across the long
    // side until each piece fills enough of its box.
    std::vector<Chart> fitted;
    std::vector<Chart> pending(std::make_move_iterator(result.charts.rbegin()),
                               std::make_move_iterator(result.charts.rend()));
    while (!pending.empty()) {
        Chart chart = std::move(pending.back());
        pending.pop_back();
        const double fill = fit_rectangle(chart, input);
        if (fill >= kMinChartFill || chart.faces.size() < kMinSplitFaces) {
            fitted.push_back(std::move(chart));
            continue;
        }
        auto pieces = split_chart(chart, input, weld, adjacency);
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
            pending.push_back(std::move(*it));
        }
    }
    result.charts = std::move(fitted);
    for (std::uint32_t c = 0; c < result.charts.size(); ++c) {
        for (std::uint32_t f : result.charts[c].faces) {
            result.face_chart[f] = c;
        }
    }

    // Largest scale s with Σ (w·s + pad)(h·s + pad) ≤ R² bounds the search from above.
    const int res = kAtlasReferenceResolution;
    const double pad = settings.padding;
    double area_sum = 0.0, perimeter_sum = 0.0;
    for (const auto& chart : result.charts) {
        const double w = chart.rect_max.x - chart.rect_min.x, h = chart.rect_max.y - chart.rect_min.y;
        area_sum += w * h;
        perimeter_sum += w + h;
    }
    const double n = static_cast<double>(result.charts.size());
    const double budget = static_cast<double>(res) * res - n * (pad + 1.0) * (pad + 1.0);
    if (budget <= 0.0) {
        throw PackingOverflowError("atlas packing overflow: " + std::to_string(result.charts.size()) +
                                   " charts do not fit at 1024x1024 texels; increase the texture resolution");
    }
    const double a = std::max(area_sum, 1e-12), b = (pad + 1.0) * perimeter_sum;
    const double s_init = (-b + std::sqrt(b * b + 4.0 * a * budget)) / (2.0 * a);

    std::vector<std::array<int, 2>> placement;
    auto sizes_at = [&](double s) {
        std::vector<RectSize> rects;
        for (std::size_t c = 0; c < result.charts.size(); ++c) {
            const auto& ch = result.charts[c];
            const int w = std::max(1, static_cast<int>(std::ceil((ch.rect_max.x - ch.rect_min.x) * s)));
            const int h = std::max(1, static_cast<int>(std::ceil((ch.rect_max.y - ch.rect_min.y) * s)));
            rects.push_back({c, w, h});
        }
        return rects;
    };
    auto fits = [&](double s) {
        std::vector<std::array<int, 2>> p;
        return shelf_pack(sizes_at(s), res, settings.padding, p);
    };

    double scale = s_init;
    if (!fits(s_init)) {
        double lo = 0.5 * s_init, hi = s_init;
        if (!fits(lo)) {
            throw PackingOverflowError("atlas packing overflow: charts do not fit even at half scale; "
                                       "increase the texture resolution");
        }
        for (int iter = 0; iter < 40; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (fits(mid) ? lo : hi) = mid;
        }
        scale = lo;
    }
    const auto rects = sizes_at(scale);
    shelf_pack(rects, res, settings.padding, placement);
    result.scale = scale;
    for (std::size_t c = 0; c < result.charts.size(); ++c) {
        auto& ch = result.charts[c];
        ch.atlas_x = placement[c][0];
        ch.atlas_y = placement[c][1];
        ch.atlas_w = rects[c].w;
        ch.atlas_h = rects[c].h;
    }

    // Split vertices per chart and assign UVs.
    const std::vector<Vec3> source_normals = input.has_normals() ? input.normals : compute_vertex_normals(input);
    Mesh& out = result.mesh;
    out.faces.resize(face_count);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> split;
    for (std::uint32_t f = 0; f < face_count; ++f) {
        const std::uint32_t c = result.face_chart[f];
        const Chart& ch = result.charts[c];
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t v = input.faces[f][k];
            auto [it, inserted] = split.try_emplace({c, v}, static_cast<std::uint32_t>(out.vertices.size()));
            if (inserted) {
                const Vec3& p = input.vertices[v];
                const double s = dot(p, ch.tangent), t = dot(p, ch.bitangent);
                const double u = (ch.atlas_x + (s - ch.rect_min.x) * scale) / res;
                const double w = (ch.atlas_y + (ch.rect_max.y - t) * scale) / res;
                out.vertices.push_back(p);
                out.normals.push_back(source_normals[v]);
                out.uv.push_back({std::clamp(u, 0.0, 1.0), std::clamp(w, 0.0, 1.0)});
            }
            out.faces[f][k] = it->second;
        }
    }
    return result;
}

std::vector<Chart> uv_islands(const Mesh& mesh) {
    std::vector<std::uint32_t> parent(mesh.vertices.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const Face& f : mesh.faces) {
        for (int k = 1; k < 3; ++k) {
            const auto a = find(f[0]), b = find(f[k]);
            if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::map<std::uint32_t, std::size_t> island_of_root;
    std::vector<Chart> charts;
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const auto root = find(mesh.faces[f][0]);
        auto [it, inserted] = island_of_root.try_emplace(root, charts.size());
        if (inserted) {
            charts.emplace_back();
        }
        charts[it->second].faces.push_back(f);
    }
    return charts;
}

SeamEdgeList find_seam_edges(const Mesh& mesh, const std::vector<Chart>& charts) {
    if (!mesh.has_uv()) {
        throw InputError("find_seam_edges: mesh has no UVs");
    }
    std::vector<std::uint32_t> face_chart(mesh.faces.size(), ~0u);
    for (std::uint32_t c = 0; c < charts.size(); ++c) {
        for (std::uint32_t f : charts[c].faces) {
            if (f >= face_chart.size()) {
                throw InputError("find_seam_edges: chart references face out of range");
            }
            face_chart[f] = c;
        }
    }
    const auto weld = weld_positions(mesh);

    struct Incidence {
        std::uint32_t face;
        Vec2 uv_lo;  // UV at the endpoint with the smaller welded id
        Vec2 uv_hi;
    };
    std::map<std::uint64_t, std::vector<Incidence>> edges;
    for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t va = face[k], vb = face[(k + 1) % 3];
            const auto wa = weld[va], wb = weld[vb];
            if (wa == wb) {
                continue;
            }
            Incidence inc{f, mesh.uv[va], mesh.uv[vb]};
            if (wa > wb) {
                std::swap(inc.uv_lo, inc.uv_hi);
            }
            edges[edge_key(wa, wb)].push_back(inc);
        }
    }

    SeamEdgeList seams;
    for (const auto& [key, incidences] : edges) {
        if (incidences.size() != 2) {
            continue;
        }
        const auto& s0 = incidences[0];
        const auto& s1 = incidences[1];
        const bool different_chart = face_chart[s0.face] != face_chart[s1.face];
        const bool discontiguous = !(s0.uv_lo == s1.uv_lo) || !(s0.uv_hi == s1.uv_hi);
        if (!different_chart && !discontiguous) {
            continue;
        }
        SeamEdge e;
        e.vertex_a = static_cast<std::uint32_t>(key >> 32);
        e.vertex_b = static_cast<std::uint32_t>(key & 0xffffffffu);
        e.side[0] = {s0.face, face_chart[s0.face], s0.uv_lo, s0.uv_hi};
        e.side[1] = {s1.face, face_chart[s1.face], s1.uv_lo, s1.uv_hi};
        seams.push_back(e);
    }
    return seams;
}

std::vector<std::int32_t> chart_id_map(const Mesh& mesh, const std::vector<Chart>& charts, int size,
                                       std::size_t* collisions) {
    std::vector<std::int32_t> ids(static_cast<std::size_t>(size) * size, -1);
    std::size_t clashes = 0;
    for (std::size_t c = 0; c < charts.size(); ++c) {
        for (std::uint32_t f : charts[c].faces) {
            const Face& face = mesh.faces[f];
            const std::array<Vec2, 3> tri = {mesh.uv[face[0]] * size, mesh.uv[face[1]] * size,
                                             mesh.uv[face[2]] * size};
            detail::raster_triangle_2d(tri, size, [&](int x, int y, const std::array<double, 3>&) {
                auto& slot = ids[static_cast<std::size_t>(y) * size + x];
                if (slot >= 0 && slot != static_cast<std::int32_t>(c)) {
                    ++clashes;
                }
                slot = static_cast<std::int32_t>(c);
            });
        }
    }
    if (collisions != nullptr) {
        *collisions = clashes;
    }
    return ids;
}

double uv_coverage(const Mesh& mesh, int size) {
    const auto fp = uv_footprint(mesh, size);
    const auto covered = std::count(fp.begin(), fp.end(), std::uint8_t{1});
    return static_cast<double>(covered) / static_cast<double>(fp.size());
}

}  // namespace gen3d

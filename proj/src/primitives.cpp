#include "gen3d/primitives.hpp"

#include <map>
#include <numbers>

namespace gen3d::primitives {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t u32(std::size_t v) { return static_cast<std::uint32_t>(v); }

}  // namespace

Mesh box(Vec3 center, Vec3 h) {
    Mesh m;
    for (int i = 0; i < 8; ++i) {
        m.vertices.push_back(center + Vec3{(i & 1) ? h.x : -h.x, (i & 2) ? h.y : -h.y, (i & 4) ? h.z : -h.z});
    }
    // Counter-clockwise seen from outside.
    m.faces = {{0, 4, 6}, {0, 6, 2},   // -x
               {1, 3, 7}, {1, 7, 5},   // +x
               {0, 1, 5}, {0, 5, 4},   // -y
               {2, 6, 7}, {2, 7, 3},   // +y
               {0, 2, 3}, {0, 3, 1},   // -z
               {4, 5, 7}, {4, 7, 6}};  // +z
    m.normals = compute_vertex_normals(m);
    return m;
}

Mesh subdivided_box(Vec3 center, Vec3 h, int n) {
    Mesh m;
    std::map<std::tuple<int, int, int>, std::uint32_t> lattice;
    auto vertex = [&](int i, int j, int k) {
        auto [it, inserted] = lattice.try_emplace({i, j, k}, u32(m.vertices.size()));
        if (inserted) {
            m.vertices.push_back(center + Vec3{h.x * (2.0 * i / n - 1.0), h.y * (2.0 * j / n - 1.0),
                                               h.z * (2.0 * k / n - 1.0)});
        }
        return it->second;
    };
    // Each face: fixed axis, fixed side, and two in-plane axes ordered so that (u × v) points outward.
    struct Side {
        int axis;
        int side;
        int u;
        int v;
    };
    const Side sides[] = {{0, 0, 2, 1}, {0, 1, 1, 2}, {1, 0, 0, 2}, {1, 1, 2, 0}, {2, 0, 1, 0}, {2, 1, 0, 1}};
    for (const auto& s : sides) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                auto at = [&](int da, int db) {
                    int c[3];
                    c[s.axis] = s.side * n;
                    c[s.u] = a + da;
                    c[s.v] = b + db;
                    return vertex(c[0], c[1], c[2]);
                };
                const auto v00 = at(0, 0), v10 = at(1, 0), v11 = at(1, 1), v01 = at(0, 1);
                m.faces.push_back({v00, v10, v11});
                m.faces.push_back({v00, v11, v01});
            }
        }
    }
    m.normals = compute_vertex_normals(m);
    return m;
}

Mesh icosphere(Vec3 center, double radius, int level) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> unit = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                              {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : unit) {
        v = normalize(v);
    }
    std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            auto [it, inserted] = midpoints.try_emplace({key.first, key.second}, u32(unit.size()));
            if (inserted) {
                unit.push_back(normalize((unit[a] + unit[b]) * 0.5));
            }
            return it->second;
        };
        std::vector<Face> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const auto a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    Mesh m;
    m.faces = std::move(faces);
    for (const auto& u : unit) {
        m.vertices.push_back(center + u * radius);
        m.normals.push_back(u);
    }
    return m;
}

Mesh torus(Vec3 center, double major, double minor, int ring_segments, int tube_segments) {
    Mesh m;
    for (int i = 0; i < ring_segments; ++i) {
        const double phi = 2.0 * kPi * i / ring_segments;
        const Vec3 ring_dir{std::cos(phi), 0.0, std::sin(phi)};
        for (int j = 0; j < tube_segments; ++j) {
            const double theta = 2.0 * kPi * j / tube_segments;
            const Vec3 n = ring_dir * std::cos(theta) + Vec3{0.0, std::sin(theta), 0.0};
            m.vertices.push_back(center + ring_dir * major + n * minor);
            m.normals.push_back(n);
        }
    }
    auto id = [&](int i, int j) { return u32((i % ring_segments) * tube_segments + (j % tube_segments)); };
    for (int i = 0; i < ring_segments; ++i) {
        for (int j = 0; j < tube_segments; ++j) {
            const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            m.faces.push_back({a, d, c});
            m.faces.push_back({a, c, b});
        }
    }
    return m;
}

Mesh capsule(Vec3 center, double radius, double half_height, int segments, int rings) {
    // Latitude rings from the north pole to the south pole; the hemisphere equators are
    // duplicated at +half_height and -half_height to form the cylinder.
    Mesh m;
    std::vector<std::pair<double, double>> lat;  // (polar angle, y offset)
    for (int r = 0; r <= rings; ++r) {
        lat.emplace_back(0.5 * kPi * r / rings, half_height);
    }
    for (int r = 0; r <= rings; ++r) {
        lat.emplace_back(0.5 * kPi + 0.5 * kPi * r / rings, -half_height);
    }
    m.vertices.push_back(center + Vec3{0.0, half_height + radius, 0.0});
    m.normals.push_back({0.0, 1.0, 0.0});
    const std::size_t first_ring = 1;
    const std::size_t ring_count = lat.size() - 2;  // exclude both poles
    for (std::size_t r = 1; r + 1 < lat.size(); ++r) {
        const auto [polar, y] = lat[r];
        for (int s = 0; s < segments; ++s) {
            const double az = 2.0 * kPi * s / segments;
            const Vec3 n{std::sin(polar) * std::cos(az), std::cos(polar), std::sin(polar) * std::sin(az)};
            m.vertices.push_back(center + Vec3{0.0, y, 0.0} + n * radius);
            m.normals.push_back(n);
        }
    }
    const auto south = u32(m.vertices.size());
    m.vertices.push_back(center + Vec3{0.0, -half_height - radius, 0.0});
    m.normals.push_back({0.0, -1.0, 0.0});

    auto ring_vertex = [&](std::size_t r, int s) { return u32(first_ring + r * segments + (s % segments)); };
    for (int s = 0; s < segments; ++s) {
        m.faces.push_back({0, ring_vertex(0, s + 1), ring_vertex(0, s)});
    }
    for (std::size_t r = 0; r + 1 < ring_count; ++r) {
        for (int s = 0; s < segments; ++s) {
            const auto a = ring_vertex(r, s), b = ring_vertex(r, s + 1), c = ring_vertex(r + 1, s + 1),
                       d = ring_vertex(r + 1, s);
            m.faces.push_back({a, b, c});
            m.faces.push_back({a, c, d});
        }
    }
    for (int s = 0; s < segments; ++s) {
        m.faces.push_back({south, ring_vertex(ring_count - 1, s), ring_vertex(ring_count - 1, s + 1)});
    }
    return m;
}

Mesh planar_grid(double half, int n) {
    Mesh m;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double u = static_cast<double>(i) / n;
            const double v = static_cast<double>(j) / n;
            m.vertices.push_back({-half + 2.0 * half * u, half - 2.0 * half * v, 0.0});
            m.uv.push_back({u, v});
            m.normals.push_back({0.0, 0.0, 1.0});
        }
    }
    auto id = [&](int i, int j) { return u32(j * (n + 1) + i); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // Row j is above row j+1 in space; keep faces counter-clockwise seen from +z.
            m.faces.push_back({id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)});
            m.faces.push_back({id(i, j + 1), id(i + 1, j), id(i, j)});
        }
    }
    return m;
}

Mesh merge(const std::vector<Mesh>& parts) {
    Mesh out;
    bool uv = !parts.empty();
    bool normals = !parts.empty();
    for (const auto& p : parts) {
        uv = uv && p.has_uv();
        normals = normals && p.has_normals();
    }
    for (const auto& p : parts) {
        const auto base = u32(out.vertices.size());
        out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
        if (uv) {
            out.uv.insert(out.uv.end(), p.uv.begin(), p.uv.end());
        }
        if (normals) {
            out.normals.insert(out.normals.end(), p.normals.begin(), p.normals.end());
        }
        for (const auto& f : p.faces) {
            out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
        }
    }
    return out;
}

}  // namespace gen3d::primitives

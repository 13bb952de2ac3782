#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace gen3d {

namespace detail {

inline bool uv_owns_edge(const Vec2& a, const Vec2& b) {
    const double dy = b.y - a.y;
    return dy > 0.0 || (dy == 0.0 && b.x - a.x < 0.0);
}

/// Rasterizes one 2D triangle (texel-space coordinates) over a size×size grid.
/// `fn(x, y, bary)` receives barycentrics in the original vertex order.
template <typename Fn>
void raster_triangle_2d(const std::array<Vec2, 3>& tri, int size, Fn&& fn) {
    int order[3] = {0, 1, 2};
    double area = orient2d(tri[0], tri[1], tri[2]);
    if (area == 0.0 || !std::isfinite(area)) {
        return;
    }
    if (area < 0.0) {
        std::swap(order[1], order[2]);
        area = -area;
    }
    const Vec2 a = tri[order[0]], b = tri[order[1]], c = tri[order[2]];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
    const int x1 = std::min(size - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}) - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
    const int y1 = std::min(size - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}) - 0.5)));
    const bool own_bc = uv_owns_edge(b, c), own_ca = uv_owns_edge(c, a), own_ab = uv_owns_edge(a, b);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Vec2 p{x + 0.5, y + 0.5};
            const double e0 = orient2d(b, c, p);
            const double e1 = orient2d(c, a, p);
            const double e2 = orient2d(a, b, p);
            if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) {
                continue;
            }
            if ((e0 == 0.0 && !own_bc) || (e1 == 0.0 && !own_ca) || (e2 == 0.0 && !own_ab)) {
                continue;
            }
            std::array<double, 3> bc{};
            bc[order[0]] = e0 / area;
            bc[order[1]] = e1 / area;
            bc[order[2]] = e2 / area;
            fn(x, y, bc);
        }
    }
}

}  // namespace detail

template <typename Fn>
void for_each_uv_texel(const Mesh& mesh, int size, Fn&& fn) {
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        const std::array<Vec2, 3> tri = {mesh.uv[face[0]] * size, mesh.uv[face[1]] * size, mesh.uv[face[2]] * size};
        detail::raster_triangle_2d(tri, size, [&](int x, int y, const std::array<double, 3>& bc) { fn(x, y, f, bc); });
    }
}

}  // namespace gen3d

#include "gen3d/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "gen3d/error.hpp"

namespace gen3d {

void Camera::validate() const {
    if (position == target) {
        throw InputError("camera position equals its target");
    }
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
        throw InputError("camera field of view must lie in (0, 180) degrees");
    }
    if (!(near_plane > 0.0 && near_plane < far_plane)) {
        throw InputError("camera requires 0 < near < far");
    }
    if (resolution < 1) {
        throw InputError("camera resolution must be positive");
    }
}

Vec3 Camera::forward() const { return normalize(target - position); }

Vec3 Camera::right() const {
    Vec3 r = cross(forward(), up);
    if (length(r) < 1e-12) {
        // Looking straight along `up`; fall back to a fixed horizontal axis.
        r = cross(forward(), Vec3{0.0, 0.0, 1.0});
    }
    return normalize(r);
}

Vec3 Camera::true_up() const { return cross(right(), forward()); }

double Camera::azimuth_deg() const {
    const Vec3 d = position - target;
    double az = degrees(std::atan2(d.x, d.z));
    if (az < 0.0) {
        az += 360.0;
    }
    return az >= 360.0 ? 0.0 : az;
}

double Camera::elevation_deg() const {
    const Vec3 d = position - target;
    return degrees(std::atan2(d.y, std::sqrt(d.x * d.x + d.z * d.z)));
}

double Camera::focal_px() const { return 0.5 * resolution / std::tan(radians(fov_deg) * 0.5); }

Vec3 Camera::ray_direction(Vec2 pixel) const {
    const double f = focal_px();
    const double half = 0.5 * resolution;
    const Vec3 dir = forward() * f + right() * (pixel.x - half) - true_up() * (pixel.y - half);
    return normalize(dir);
}

std::vector<Camera> canonical_cameras(int k, double elevation_deg, double radius, int resolution, double fov_deg,
                                      ElevationPattern pattern) {
    if (k < 1) {
        throw InputError("canonical_cameras: view count must be at least 1");
    }
    std::vector<Camera> cameras;
    cameras.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double el = radians(pattern == ElevationPattern::alternating && i % 2 == 1 ? -elevation_deg : elevation_deg);
        const double az = radians(360.0 * i / k);
        Camera cam;
        cam.position = Vec3{std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)} * radius;
        cam.target = {0.0, 0.0, 0.0};
        cam.fov_deg = fov_deg;
        cam.resolution = resolution;
        cam.validate();
        cameras.push_back(cam);
    }
    return cameras;
}

Projection project(const Vec3& point, const Camera& camera) {
    const Vec3 d = point - camera.position;
    const Vec3 f = camera.forward();
    const Vec3 r = camera.right();
    const Vec3 u = cross(r, f);
    const double z = dot(d, f);
    Projection p;
    p.depth = z;
    if (z <= 0.0) {
        p.in_frustum = false;
        return p;
    }
    const double focal = camera.focal_px();
    const double half = 0.5 * camera.resolution;
    p.pixel = {half + focal * dot(d, r) / z, half - focal * dot(d, u) / z};
    p.in_frustum = z >= camera.near_plane && z <= camera.far_plane && p.pixel.x >= 0.0 &&
                   p.pixel.x < camera.resolution && p.pixel.y >= 0.0 && p.pixel.y < camera.resolution;
    return p;
}

RenderedView::RenderedView(int res)
    : resolution(res),
      shaded(res, res, 3),
      albedo(res, res, 3),
      material(res, res, 2),
      normal(res, res, 3),
      depth(res, res, 1, kNoDepth),
      mask(static_cast<std::size_t>(res) * res, 0) {}

namespace {

/// Edge ownership for pixels exactly on an edge; opposite traversals of a shared edge
/// disagree, so each such pixel belongs to exactly one of the two triangles.
bool owns_edge(const Vec2& a, const Vec2& b) {
    const double dy = b.y - a.y;
    const double dx = b.x - a.x;
    return dy > 0.0 || (dy == 0.0 && dx < 0.0);
}

}  // namespace

RenderedView rasterize(const Mesh& mesh, const Camera& camera, const PBRTextureSet* materials,
                       const LightConfig& light) {
    camera.validate();
    if (materials != nullptr && !mesh.has_uv()) {
        throw InputError("rasterize: textured rendering requires UVs");
    }
    const int res = camera.resolution;
    RenderedView view(res);
    const std::size_t pixel_count = static_cast<std::size_t>(res) * res;
    std::vector<double> zbuf(pixel_count, std::numeric_limits<double>::infinity());
    std::vector<std::int32_t> face_id(pixel_count, -1);
    std::vector<std::array<double, 3>> bary(pixel_count);

    const Vec3 f = camera.forward();
    const Vec3 r = camera.right();
    const Vec3 u = cross(r, f);
    const double focal = camera.focal_px();
    const double half = 0.5 * res;

    std::vector<Vec3> cam_space(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3 d = mesh.vertices[i] - camera.position;
        cam_space[i] = {dot(d, r), dot(d, u), dot(d, f)};
    }

    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const Face& face = mesh.faces[fi];
        Vec3 c[3] = {cam_space[face[0]], cam_space[face[1]], cam_space[face[2]]};
        if (c[0].z < camera.near_plane || c[1].z < camera.near_plane || c[2].z < camera.near_plane) {
            continue;
        }
        Vec2 s[3];
        for (int k = 0; k < 3; ++k) {
            s[k] = {half + focal * c[k].x / c[k].z, half - focal * c[k].y / c[k].z};
        }
        int order[3] = {0, 1, 2};
        double area = orient2d(s[0], s[1], s[2]);
        if (area == 0.0) {
            continue;
        }
        if (area < 0.0) {
            std::swap(order[1], order[2]);
            area = -area;
        }
        const Vec2 a = s[order[0]], b = s[order[1]], cc = s[order[2]];
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, cc.x}) - 0.5)));
        const int x1 = std::min(res - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, cc.x}) - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, cc.y}) - 0.5)));
        const int y1 = std::min(res - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, cc.y}) - 0.5)));
        if (x0 > x1 || y0 > y1) {
            continue;
        }
        const bool own_bc = owns_edge(b, cc), own_ca = owns_edge(cc, a), own_ab = owns_edge(a, b);
        const double inv_z[3] = {1.0 / c[order[0]].z, 1.0 / c[order[1]].z, 1.0 / c[order[2]].z};

        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec2 p{x + 0.5, y + 0.5};
                const double e0 = orient2d(b, cc, p);
                const double e1 = orient2d(cc, a, p);
                const double e2 = orient2d(a, b, p);
                if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) {
                    continue;
                }
                if ((e0 == 0.0 && !own_bc) || (e1 == 0.0 && !own_ca) || (e2 == 0.0 && !own_ab)) {
                    continue;
                }
                const double l0 = e0 / area, l1 = e1 / area, l2 = e2 / area;
                const double w0 = l0 * inv_z[0], w1 = l1 * inv_z[1], w2 = l2 * inv_z[2];
                const double wsum = w0 + w1 + w2;
                const double z = 1.0 / wsum;
                if (z > camera.far_plane || z < camera.near_plane) {
                    continue;
                }
                const std::size_t idx = static_cast<std::size_t>(y) * res + x;
                if (z >= zbuf[idx]) {
                    continue;
                }
                zbuf[idx] = z;
                face_id[idx] = static_cast<std::int32_t>(fi);
                std::array<double, 3> bc{};
                bc[order[0]] = w0 / wsum;
                bc[order[1]] = w1 / wsum;
                bc[order[2]] = w2 / wsum;
                bary[idx] = bc;
            }
        }
    }

    const std::vector<Vec3> computed_normals = mesh.has_normals() ? std::vector<Vec3>{} : compute_vertex_normals(mesh);
    const std::vector<Vec3>& normals = mesh.has_normals() ? mesh.normals : computed_normals;

    for (int y = 0; y < res; ++y) {
        for (int x = 0; x < res; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * res + x;
            if (face_id[idx] < 0) {
                continue;
            }
            const Face& face = mesh.faces[static_cast<std::size_t>(face_id[idx])];
            const auto& bc = bary[idx];
            const Vec3 point =
                mesh.vertices[face[0]] * bc[0] + mesh.vertices[face[1]] * bc[1] + mesh.vertices[face[2]] * bc[2];
            Vec3 n = normalize(normals[face[0]] * bc[0] + normals[face[1]] * bc[1] + normals[face[2]] * bc[2]);
            if (n == Vec3{}) {
                n = face_normal(mesh, static_cast<std::size_t>(face_id[idx]));
            }
            MaterialSample mat = kDefaultMaterial;
            if (materials != nullptr) {
                const Vec2 uv = mesh.uv[face[0]] * bc[0] + mesh.uv[face[1]] * bc[1] + mesh.uv[face[2]] * bc[2];
                mat = sample_material(*materials, uv);
            }
            const Vec3 shaded = shade(mat, n, normalize(camera.position - point), light);

            view.mask[idx] = 1;
            view.depth.data[idx] = static_cast<float>(zbuf[idx]);
            for (int ch = 0; ch < 3; ++ch) {
                view.albedo.at(x, y, ch) = static_cast<float>(mat.albedo[ch]);
                view.shaded.at(x, y, ch) = static_cast<float>(shaded[ch]);
                view.normal.at(x, y, ch) = static_cast<float>(n[ch]);
            }
            view.material.at(x, y, 0) = static_cast<float>(mat.roughness);
            view.material.at(x, y, 1) = static_cast<float>(mat.metalness);
        }
    }
    return view;
}

PixelFootprint depth_consistent_footprint(const RenderedView& view, Vec2 pixel, double reference_depth,
                                          double slack) {
    PixelFootprint fp;
    const double gx = pixel.x - 0.5;
    const double gy = pixel.y - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    const double fx = gx - x0;
    const double fy = gy - y0;
    const double weights[4] = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const int x = x0 + (k & 1);
        const int y = y0 + (k >> 1);
        if (weights[k] <= 0.0 || x < 0 || y < 0 || x >= view.resolution || y >= view.resolution) {
            continue;
        }
        if (!view.covered(x, y)) {
            continue;
        }
        const double d = view.depth.at(x, y, 0);
        if (std::abs(d - reference_depth) >= slack) {
            continue;
        }
        fp.x[fp.count] = x;
        fp.y[fp.count] = y;
        fp.w[fp.count] = weights[k];
        total += weights[k];
        ++fp.count;
    }
    for (int k = 0; k < fp.count; ++k) {
        fp.w[k] /= total;
    }
    return fp;
}

double footprint_depth(const RenderedView& view, const PixelFootprint& fp) {
    double d = 0.0;
    for (int k = 0; k < fp.count; ++k) {
        d += fp.w[k] * view.depth.at(fp.x[k], fp.y[k], 0);
    }
    return d;
}

double pixel_world_size(const Camera& camera, double z) {
    return z * 2.0 * std::tan(radians(camera.fov_deg) * 0.5) / camera.resolution;
}

}  // namespace gen3d

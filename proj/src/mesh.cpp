#include "gen3d/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "gen3d/error.hpp"
#include "gen3d/image.hpp"

namespace gen3d {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            tokens.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return tokens;
}

double parse_double(std::string_view token, std::size_t line) {
    // std::from_chars for double is available in libstdc++ 11.
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ObjParseError(line, "malformed number '" + std::string(token) + "'");
    }
    return value;
}

/// Resolves a 1-based (or negative, relative) OBJ index into a 0-based one.
std::int64_t resolve_index(std::string_view token, std::size_t count, std::size_t line, const char* kind) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ObjParseError(line, std::string("malformed ") + kind + " index '" + std::string(token) + "'");
    }
    std::int64_t resolved = value > 0 ? value - 1 : static_cast<std::int64_t>(count) + value;
    if (value == 0 || resolved < 0 || resolved >= static_cast<std::int64_t>(count)) {
        throw ObjParseError(line, std::string(kind) + " index " + std::to_string(value) + " out of range");
    }
    return resolved;
}

struct Corner {
    std::int64_t position = -1;
    std::int64_t uv = -1;
    std::int64_t normal = -1;

    auto operator<=>(const Corner&) const = default;
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

Mesh load_obj(std::string_view text) {
    std::vector<Vec3> positions;
    std::vector<Vec2> uvs;
    std::vector<Vec3> normals;
    std::vector<std::array<Corner, 3>> triangles;
    bool any_uv_corner = false;
    bool any_plain_corner = false;
    bool any_normal_corner = false;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = split_ws(line);
        if (tokens.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const std::string_view tag = tokens[0];
        if (tag == "v") {
            if (tokens.size() < 4) {
                throw ObjParseError(line_no, "vertex needs 3 coordinates");
            }
            positions.emplace_back(parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
                                   parse_double(tokens[3], line_no));
        } else if (tag == "vt") {
            if (tokens.size() < 3) {
                throw ObjParseError(line_no, "texture coordinate needs 2 components");
            }
            uvs.emplace_back(parse_double(tokens[1], line_no), 1.0 - parse_double(tokens[2], line_no));
        } else if (tag == "vn") {
            if (tokens.size() < 4) {
                throw ObjParseError(line_no, "normal needs 3 components");
            }
            normals.emplace_back(parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
                                 parse_double(tokens[3], line_no));
        } else if (tag == "f") {
            if (tokens.size() < 4) {
                throw ObjParseError(line_no, "face needs at least 3 corners");
            }
            std::vector<Corner> corners;
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                const std::string_view ref = tokens[t];
                Corner corner;
                const auto s1 = ref.find('/');
                corner.position = resolve_index(ref.substr(0, s1), positions.size(), line_no, "vertex");
                if (s1 != std::string_view::npos) {
                    const auto rest = ref.substr(s1 + 1);
                    const auto s2 = rest.find('/');
                    const auto uv_part = rest.substr(0, s2);
                    if (!uv_part.empty()) {
                        corner.uv = resolve_index(uv_part, uvs.size(), line_no, "texture coordinate");
                    }
                    if (s2 != std::string_view::npos && s2 + 1 < rest.size()) {
                        corner.normal = resolve_index(rest.substr(s2 + 1), normals.size(), line_no, "normal");
                    }
                }
                (corner.uv >= 0 ? any_uv_corner : any_plain_corner) = true;
                any_normal_corner = any_normal_corner || corner.normal >= 0;
                corners.push_back(corner);
            }
            if (any_uv_corner && any_plain_corner) {
                throw ObjParseError(line_no, "faces mix corners with and without texture coordinates");
            }
            for (std::size_t k = 1; k + 1 < corners.size(); ++k) {
                triangles.push_back({corners[0], corners[k], corners[k + 1]});
            }
        }
        // Other records (o, g, s, usemtl, mtllib, l, p) carry nothing we use.
        if (end == text.size()) {
            break;
        }
    }

    if (triangles.empty()) {
        throw InputError("OBJ contains no faces");
    }

    Mesh mesh;
    std::map<Corner, std::uint32_t> corner_ids;
    const bool with_normals = any_normal_corner;
    for (const auto& tri : triangles) {
        Face face{};
        for (int k = 0; k < 3; ++k) {
            Corner key = tri[k];
            if (!with_normals) {
                key.normal = -1;
            }
            auto [it, inserted] = corner_ids.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
            if (inserted) {
                mesh.vertices.push_back(positions[static_cast<std::size_t>(key.position)]);
                if (any_uv_corner) {
                    mesh.uv.push_back(uvs[static_cast<std::size_t>(key.uv)]);
                }
                if (with_normals) {
                    mesh.normals.push_back(key.normal >= 0 ? normalize(normals[static_cast<std::size_t>(key.normal)])
                                                           : Vec3{});
                }
            }
            face[k] = it->second;
        }
        mesh.faces.push_back(face);
    }

    normalize_to_unit_cube(mesh);
    if (mesh.normals.empty()) {
        mesh.normals = compute_vertex_normals(mesh);
    } else {
        // Corners without an explicit vn fall back to the computed normal.
        const auto computed = compute_vertex_normals(mesh);
        for (std::size_t i = 0; i < mesh.normals.size(); ++i) {
            if (mesh.normals[i] == Vec3{}) {
                mesh.normals[i] = computed[i];
            }
        }
    }
    return mesh;
}

Mesh load_obj_file(const std::string& path) {
    const auto bytes = read_file(path);
    return load_obj(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string save_obj(const Mesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& v : mesh.vertices) {
        out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    }
    for (const auto& t : mesh.uv) {
        out << "vt " << t.x << ' ' << 1.0 - t.y << '\n';
    }
    for (const auto& n : mesh.normals) {
        out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
    }
    const bool uv = mesh.has_uv();
    const bool nrm = mesh.has_normals();
    for (const auto& f : mesh.faces) {
        out << 'f';
        for (std::uint32_t idx : f) {
            const std::uint32_t i = idx + 1;
            out << ' ' << i;
            if (uv || nrm) {
                out << '/';
                if (uv) {
                    out << i;
                }
                if (nrm) {
                    out << '/' << i;
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

Vec3 face_normal(const Mesh& mesh, std::size_t face) {
    const auto& f = mesh.faces[face];
    const Vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]], mesh.vertices[f[2]] - mesh.vertices[f[0]]);
    return normalize(n);
}

double face_area(const Mesh& mesh, std::size_t face) {
    const auto& f = mesh.faces[face];
    return 0.5 * length(cross(mesh.vertices[f[1]] - mesh.vertices[f[0]], mesh.vertices[f[2]] - mesh.vertices[f[0]]));
}

std::vector<Vec3> compute_vertex_normals(const Mesh& mesh) {
    std::vector<Vec3> acc(mesh.vertices.size());
    for (const auto& f : mesh.faces) {
        // The unnormalized cross product is the face normal scaled by twice the area.
        const Vec3 n = cross(mesh.vertices[f[1]] - mesh.vertices[f[0]], mesh.vertices[f[2]] - mesh.vertices[f[0]]);
        for (std::uint32_t idx : f) {
            acc[idx] += n;
        }
    }
    for (auto& n : acc) {
        n = normalize(n);
    }
    return acc;
}

Bounds bounding_box(const Mesh& mesh) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Bounds b{{inf, inf, inf}, {-inf, -inf, -inf}};
    for (const auto& v : mesh.vertices) {
        b.min = {std::min(b.min.x, v.x), std::min(b.min.y, v.y), std::min(b.min.z, v.z)};
        b.max = {std::max(b.max.x, v.x), std::max(b.max.y, v.y), std::max(b.max.z, v.z)};
    }
    return b;
}

void normalize_to_unit_cube(Mesh& mesh) {
    if (mesh.vertices.empty()) {
        return;
    }
    const Bounds b = bounding_box(mesh);
    const Vec3 center = (b.min + b.max) * 0.5;
    const Vec3 extent = b.max - b.min;
    const double largest = std::max({extent.x, extent.y, extent.z});
    const double scale = largest > 0.0 ? 1.0 / largest : 1.0;
    for (auto& v : mesh.vertices) {
        v = (v - center) * scale;
    }
}

std::vector<std::uint32_t> weld_positions(const Mesh& mesh) {
    struct Key {
        double x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(&k), sizeof(Key)));
        }
    };
    std::unordered_map<Key, std::uint32_t, KeyHash> first;
    first.reserve(mesh.vertices.size());
    std::vector<std::uint32_t> ids(mesh.vertices.size());
    for (std::uint32_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        // +0.0 and -0.0 compare equal but hash differently.
        const Key key{v.x + 0.0, v.y + 0.0, v.z + 0.0};
        ids[i] = first.try_emplace(key, i).first->second;
    }
    return ids;
}

ValidationReport validate_mesh(const Mesh& mesh) {
    ValidationReport report;
    const std::size_t nv = mesh.vertices.size();
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        bool in_range = true;
        for (std::uint32_t idx : mesh.faces[f]) {
            if (idx >= nv) {
                ++report.out_of_range_indices;
                in_range = false;
            }
        }
        if (in_range && face_area(mesh, f) < kDegenerateArea) {
            ++report.degenerate_faces;
        }
    }
    if (mesh.has_uv()) {
        if (mesh.uv.size() != nv) {
            report.out_of_range_uvs += std::max(mesh.uv.size(), nv) - std::min(mesh.uv.size(), nv);
        }
        for (const auto& t : mesh.uv) {
            if (!(t.x >= 0.0 && t.x <= 1.0 && t.y >= 0.0 && t.y <= 1.0)) {
                ++report.out_of_range_uvs;
            }
        }
    }

    const auto weld = weld_positions(mesh);
    std::unordered_map<std::uint64_t, int> incidence;
    for (const auto& f : mesh.faces) {
        if (f[0] >= nv || f[1] >= nv || f[2] >= nv) {
            continue;
        }
        for (int k = 0; k < 3; ++k) {
            ++incidence[edge_key(weld[f[k]], weld[f[(k + 1) % 3]])];
        }
    }
    for (const auto& [key, count] : incidence) {
        if (count > 2) {
            ++report.non_manifold_edges;
        }
    }
    report.pass = report.out_of_range_indices == 0 && report.degenerate_faces == 0 && report.out_of_range_uvs == 0;
    return report;
}

std::uint64_t mesh_hash(const Mesh& mesh) {
    auto bytes_of = [](const auto& vec) {
        return std::span(reinterpret_cast<const std::uint8_t*>(vec.data()), vec.size() * sizeof(vec[0]));
    };
    std::uint64_t h = fnv1a64(bytes_of(mesh.vertices));
    h = fnv1a64(bytes_of(mesh.faces), h);
    h = fnv1a64(bytes_of(mesh.uv), h);
    h = fnv1a64(bytes_of(mesh.normals), h);
    return h;
}

}  // namespace gen3d

#include "gen3d/gltf.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include <nlohmann/json.hpp>

#include "gen3d/error.hpp"
#include "gen3d/image.hpp"

namespace gen3d {

namespace {

using json = nlohmann::json;

constexpr std::uint32_t kGlbMagic = 0x46546C67;  // "glTF"
constexpr std::uint32_t kChunkJson = 0x4E4F534A;
constexpr std::uint32_t kChunkBin = 0x004E4942;
constexpr int kFloat = 5126;
constexpr int kUnsignedInt = 5125;
constexpr int kUnsignedShort = 5123;
constexpr int kArrayBuffer = 34962;
constexpr int kElementArrayBuffer = 34963;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
    }
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    if (offset + 4 > in.size()) {
        throw InputError("GLB: truncated");
    }
    return static_cast<std::uint32_t>(in[offset]) | (static_cast<std::uint32_t>(in[offset + 1]) << 8) |
           (static_cast<std::uint32_t>(in[offset + 2]) << 16) | (static_cast<std::uint32_t>(in[offset + 3]) << 24);
}

float get_f32(std::span<const std::uint8_t> in, std::size_t offset) { return std::bit_cast<float>(get_u32(in, offset)); }

void align4(std::vector<std::uint8_t>& bin) {
    while (bin.size() % 4 != 0) {
        bin.push_back(0);
    }
}

class BinBuilder {
public:
    json views = json::array();
    json accessors = json::array();
    std::vector<std::uint8_t> bin;

    int add_view(std::span<const std::uint8_t> bytes, std::optional<int> target) {
        align4(bin);
        json view = {{"buffer", 0}, {"byteOffset", bin.size()}, {"byteLength", bytes.size()}};
        if (target) {
            view["target"] = *target;
        }
        bin.insert(bin.end(), bytes.begin(), bytes.end());
        views.push_back(view);
        return static_cast<int>(views.size()) - 1;
    }

    int add_accessor(int view, int component_type, std::size_t count, const char* type,
                     std::optional<std::pair<json, json>> min_max = std::nullopt) {
        json acc = {{"bufferView", view}, {"componentType", component_type}, {"count", count}, {"type", type}};
        if (min_max) {
            acc["min"] = min_max->first;
            acc["max"] = min_max->second;
        }
        accessors.push_back(acc);
        return static_cast<int>(accessors.size()) - 1;
    }
};

}  // namespace

std::vector<std::uint8_t> save_gltf(const Mesh& mesh, const PBRTextureSet* materials) {
    if (mesh.empty()) {
        throw InputError("save_gltf: mesh has no faces");
    }
    if (materials != nullptr) {
        if (!mesh.has_uv()) {
            throw InputError("save_gltf: materials require UVs on the mesh");
        }
        const auto texels = static_cast<std::size_t>(materials->size) * materials->size;
        if (materials->size <= 0 || materials->albedo.size() != texels * 3 || materials->roughness.size() != texels ||
            materials->metalness.size() != texels) {
            throw InputError("save_gltf: texture size mismatch between albedo, roughness and metalness");
        }
    }
    if (mesh.has_uv() && mesh.uv.size() != mesh.vertices.size()) {
        throw InputError("save_gltf: UV count differs from vertex count");
    }
    for (const Face& f : mesh.faces) {
        for (std::uint32_t idx : f) {
            if (idx >= mesh.vertices.size()) {
                throw InputError("save_gltf: face index out of range");
            }
        }
    }

    BinBuilder b;
    json attributes = json::object();

    {
        std::vector<std::uint8_t> bytes;
        float lo[3] = {std::numeric_limits<float>::max(), std::numeric_limits<float>::max(),
                       std::numeric_limits<float>::max()};
        float hi[3] = {std::numeric_limits<float>::lowest(), std::numeric_limits<float>::lowest(),
                       std::numeric_limits<float>::lowest()};
        for (const auto& v : mesh.vertices) {
            const float p[3] = {static_cast<float>(v.x), static_cast<float>(v.y), static_cast<float>(v.z)};
            for (int c = 0; c < 3; ++c) {
                put_f32(bytes, p[c]);
                lo[c] = std::min(lo[c], p[c]);
                hi[c] = std::max(hi[c], p[c]);
            }
        }
        const int view = b.add_view(bytes, kArrayBuffer);
        attributes["POSITION"] = b.add_accessor(view, kFloat, mesh.vertices.size(), "VEC3",
                                                std::pair{json{lo[0], lo[1], lo[2]}, json{hi[0], hi[1], hi[2]}});
    }
    {
        const std::vector<Vec3> normals = mesh.has_normals() ? mesh.normals : compute_vertex_normals(mesh);
        std::vector<std::uint8_t> bytes;
        for (const auto& n : normals) {
            Vec3 u = normalize(n);
            if (u == Vec3{}) {
                u = {0.0, 1.0, 0.0};
            }
            // Renormalize in float precision.
            const float fx = static_cast<float>(u.x), fy = static_cast<float>(u.y), fz = static_cast<float>(u.z);
            const float len = std::sqrt(fx * fx + fy * fy + fz * fz);
            put_f32(bytes, fx / len);
            put_f32(bytes, fy / len);
            put_f32(bytes, fz / len);
        }
        const int view = b.add_view(bytes, kArrayBuffer);
        attributes["NORMAL"] = b.add_accessor(view, kFloat, normals.size(), "VEC3");
    }
    if (mesh.has_uv()) {
        std::vector<std::uint8_t> bytes;
        for (const auto& t : mesh.uv) {
            put_f32(bytes, static_cast<float>(t.x));
            put_f32(bytes, static_cast<float>(t.y));
        }
        const int view = b.add_view(bytes, kArrayBuffer);
        attributes["TEXCOORD_0"] = b.add_accessor(view, kFloat, mesh.uv.size(), "VEC2");
    }
    int index_accessor = 0;
    {
        std::vector<std::uint8_t> bytes;
        for (const Face& f : mesh.faces) {
            for (std::uint32_t idx : f) {
                put_u32(bytes, idx);
            }
        }
        const int view = b.add_view(bytes, kElementArrayBuffer);
        index_accessor = b.add_accessor(view, kUnsignedInt, mesh.faces.size() * 3, "SCALAR");
    }

    json primitive = {{"attributes", attributes}, {"indices", index_accessor}, {"mode", 4}};
    json doc = {{"asset", {{"version", "2.0"}, {"generator", "gen3d"}}},
                {"scene", 0},
                {"scenes", json::array({{{"nodes", json::array({0})}}})},
                {"nodes", json::array({{{"mesh", 0}}})}};

    if (materials != nullptr) {
        const int l = materials->size;
        Image albedo(l, l, 3);
        Image packed(l, l, 3);
        const auto texels = static_cast<std::size_t>(l) * l;
        for (std::size_t i = 0; i < texels; ++i) {
            for (int c = 0; c < 3; ++c) {
                albedo.data[i * 3 + c] = materials->albedo[i * 3 + c];
            }
            packed.data[i * 3 + 0] = 0.0f;
            packed.data[i * 3 + 1] = materials->roughness[i];
            packed.data[i * 3 + 2] = materials->metalness[i];
        }
        const auto albedo_png = encode_png8(albedo, 4);
        const auto mr_png = encode_png8(packed, 3);
        const int albedo_view = b.add_view(albedo_png, std::nullopt);
        const int mr_view = b.add_view(mr_png, std::nullopt);
        doc["images"] = json::array({{{"bufferView", albedo_view}, {"mimeType", "image/png"}},
                                     {{"bufferView", mr_view}, {"mimeType", "image/png"}}});
        doc["samplers"] = json::array({{{"magFilter", 9729}, {"minFilter", 9987}, {"wrapS", 33071}, {"wrapT", 33071}}});
        doc["textures"] = json::array({{{"sampler", 0}, {"source", 0}}, {{"sampler", 0}, {"source", 1}}});
        doc["materials"] = json::array({{{"name", "pbr"},
                                         {"pbrMetallicRoughness",
                                          {{"baseColorTexture", {{"index", 0}}},
                                           {"metallicRoughnessTexture", {{"index", 1}}},
                                           {"metallicFactor", 1.0},
                                           {"roughnessFactor", 1.0}}}}});
        primitive["material"] = 0;
    }
    doc["meshes"] = json::array({{{"primitives", json::array({primitive})}}});
    align4(b.bin);
    doc["buffers"] = json::array({{{"byteLength", b.bin.size()}}});
    doc["bufferViews"] = b.views;
    doc["accessors"] = b.accessors;

    std::string text = doc.dump();
    while (text.size() % 4 != 0) {
        text.push_back(' ');
    }
    std::vector<std::uint8_t> out;
    const std::size_t total = 12 + 8 + text.size() + 8 + b.bin.size();
    out.reserve(total);
    put_u32(out, kGlbMagic);
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(total));
    put_u32(out, static_cast<std::uint32_t>(text.size()));
    put_u32(out, kChunkJson);
    out.insert(out.end(), text.begin(), text.end());
    put_u32(out, static_cast<std::uint32_t>(b.bin.size()));
    put_u32(out, kChunkBin);
    out.insert(out.end(), b.bin.begin(), b.bin.end());
    return out;
}

GltfAsset load_glb(std::span<const std::uint8_t> bytes) {
    if (get_u32(bytes, 0) != kGlbMagic || get_u32(bytes, 4) != 2) {
        throw InputError("GLB: bad header");
    }
    const std::uint32_t json_len = get_u32(bytes, 12);
    if (get_u32(bytes, 16) != kChunkJson || 20 + static_cast<std::size_t>(json_len) > bytes.size()) {
        throw InputError("GLB: missing JSON chunk");
    }
    const json doc = json::parse(bytes.begin() + 20, bytes.begin() + 20 + json_len);
    std::span<const std::uint8_t> bin;
    const std::size_t bin_header = 20 + static_cast<std::size_t>(json_len);
    if (bin_header + 8 <= bytes.size()) {
        const std::uint32_t bin_len = get_u32(bytes, bin_header);
        if (get_u32(bytes, bin_header + 4) != kChunkBin || bin_header + 8 + bin_len > bytes.size()) {
            throw InputError("GLB: malformed BIN chunk");
        }
        bin = bytes.subspan(bin_header + 8, bin_len);
    }

    auto view_span = [&](int view_index) {
        const json& view = doc.at("bufferViews").at(static_cast<std::size_t>(view_index));
        const std::size_t offset = view.value("byteOffset", std::size_t{0});
        const std::size_t len = view.at("byteLength").get<std::size_t>();
        if (offset + len > bin.size()) {
            throw InputError("GLB: buffer view out of range");
        }
        return bin.subspan(offset, len);
    };
    auto read_floats = [&](int accessor_index, int components) {
        const json& acc = doc.at("accessors").at(static_cast<std::size_t>(accessor_index));
        if (acc.at("componentType").get<int>() != kFloat) {
            throw InputError("GLB: expected float accessor");
        }
        const auto data = view_span(acc.at("bufferView").get<int>()).subspan(acc.value("byteOffset", std::size_t{0}));
        const std::size_t count = acc.at("count").get<std::size_t>();
        if (data.size() < count * components * 4) {
            throw InputError("GLB: accessor exceeds its buffer view");
        }
        std::vector<double> out(count * components);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = get_f32(data, i * 4);
        }
        return out;
    };

    const json& primitive = doc.at("meshes").at(0).at("primitives").at(0);
    if (primitive.value("mode", 4) != 4) {
        throw InputError("GLB: only triangle lists are supported");
    }
    const json& attributes = primitive.at("attributes");
    GltfAsset asset;
    {
        const auto p = read_floats(attributes.at("POSITION").get<int>(), 3);
        for (std::size_t i = 0; i < p.size(); i += 3) {
            asset.mesh.vertices.push_back({p[i], p[i + 1], p[i + 2]});
        }
    }
    if (attributes.contains("NORMAL")) {
        const auto n = read_floats(attributes["NORMAL"].get<int>(), 3);
        for (std::size_t i = 0; i < n.size(); i += 3) {
            asset.mesh.normals.push_back({n[i], n[i + 1], n[i + 2]});
        }
    }
    if (attributes.contains("TEXCOORD_0")) {
        const auto t = read_floats(attributes["TEXCOORD_0"].get<int>(), 2);
        for (std::size_t i = 0; i < t.size(); i += 2) {
            asset.mesh.uv.push_back({t[i], t[i + 1]});
        }
    }
    {
        const json& acc = doc.at("accessors").at(primitive.at("indices").get<std::size_t>());
        const int type = acc.at("componentType").get<int>();
        const auto data = view_span(acc.at("bufferView").get<int>()).subspan(acc.value("byteOffset", std::size_t{0}));
        const std::size_t count = acc.at("count").get<std::size_t>();
        const std::size_t stride = type == kUnsignedInt ? 4 : (type == kUnsignedShort ? 2 : 0);
        if (stride == 0 || count % 3 != 0 || data.size() < count * stride) {
            throw InputError("GLB: unsupported index accessor");
        }
        for (std::size_t i = 0; i < count; i += 3) {
            Face f{};
            for (int k = 0; k < 3; ++k) {
                const std::size_t o = (i + k) * stride;
                f[k] = stride == 4 ? get_u32(data, o) : static_cast<std::uint32_t>(data[o] | (data[o + 1] << 8));
            }
            asset.mesh.faces.push_back(f);
        }
    }

    if (primitive.contains("material")) {
        const json& pbr = doc.at("materials").at(primitive["material"].get<std::size_t>()).at("pbrMetallicRoughness");
        auto decode_texture = [&](const json& texture_ref) {
            const json& texture = doc.at("textures").at(texture_ref.at("index").get<std::size_t>());
            const json& image = doc.at("images").at(texture.at("source").get<std::size_t>());
            return decode_png_float(view_span(image.at("bufferView").get<int>()));
        };
        const Image albedo = decode_texture(pbr.at("baseColorTexture"));
        const Image mr = decode_texture(pbr.at("metallicRoughnessTexture"));
        if (albedo.width != albedo.height || mr.width != albedo.width || mr.height != albedo.height ||
            albedo.channels < 3 || mr.channels < 3) {
            throw InputError("GLB: material textures have inconsistent sizes");
        }
        PBRTextureSet set(albedo.width);
        const auto texels = static_cast<std::size_t>(albedo.width) * albedo.height;
        for (std::size_t i = 0; i < texels; ++i) {
            for (int c = 0; c < 3; ++c) {
                set.albedo[i * 3 + c] = albedo.data[i * albedo.channels + c];
            }
            set.roughness[i] = mr.data[i * mr.channels + 1];
            set.metalness[i] = mr.data[i * mr.channels + 2];
        }
        asset.materials = std::move(set);
    }
    return asset;
}

}  // namespace gen3d

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gen3d/materials.hpp"
#include "gen3d/mesh.hpp"

namespace gen3d {

/// Binary glTF 2.0 (GLB) with one mesh, one node and, when `materials` is given, a
/// pbrMetallicRoughness material:
///   baseColorTexture         = albedo as RGBA8 PNG (alpha 255)
///   metallicRoughnessTexture = RGB8 PNG, G = roughness, B = metalness, R = 0
/// Throws InputError when materials are given for a mesh without UVs.
std::vector<std::uint8_t> save_gltf(const Mesh& mesh, const PBRTextureSet* materials = nullptr);

struct GltfAsset {
    Mesh mesh;
    std::optional<PBRTextureSet> materials;
};

/// Reads GLBs produced by `save_gltf` (first primitive of the first mesh, triangle lists,
/// float positions/normals/UVs, 16- or 32-bit indices, PNG textures).
GltfAsset load_glb(std::span<const std::uint8_t> bytes);

}  // namespace gen3d

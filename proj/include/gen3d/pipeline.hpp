#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gen3d/atlas.hpp"
#include "gen3d/generators.hpp"
#include "gen3d/materials.hpp"
#include "gen3d/mesh.hpp"
#include "gen3d/texture.hpp"
#include "gen3d/volume.hpp"

namespace gen3d {

/// Every knob of a run. `to_json`/`from_json` round-trip exactly; `from_json` rejects
/// unknown keys, wrong types and out-of-range values.
struct PipelineConfig {
    struct Views {
        int count = 4;              // K
        double elevation_deg = 20.0;
        std::string elevation_pattern = "alternating";  // "alternating" (±elevation) or "ring"
        double radius = 2.2;
        double fov_deg = 40.0;
        int resolution = 512;
    } views;
    struct Sdf {
        int resolution = 64;
        double truncation_cells = 3.0;  // τ
        double carve_weight = 0.25;
        double min_weight = 0.5;
        double iso = 0.0;
    } sdf;
    struct Atlas {
        double theta_max_deg = 45.0;
        int padding = 4;
    } atlas;
    struct TextureKnobs {
        int resolution = 1024;  // L
        double confidence_exponent = 2.0;  // p
        double confidence_floor = 0.1;
        double depth_tolerance = 1e-3;     // δ_d
        int hole_padding = 4;
    } texture;
    struct Seams {
        int iterations = 8;
        double relaxation = 0.7;  // λ
        double samples_per_texel = 2.0;  // S
    } seams;
    int upscale_factor = 1;  // 1 (off), 2 or 4
    struct Backend {
        std::string kind = "procedural";  // procedural | remote | replay
        double jitter = 0.0;              // σ of the procedural backend
        std::string endpoint;             // remote; falls back to $GEN3D_ENDPOINT
        double timeout_s = 30.0;
        int retries = 2;
        int max_in_flight = 2;
        std::string replay_dir;
    } backend;
    LightConfig light;
    std::optional<std::uint64_t> seed;  // overrides the prompt-derived seed
    std::string output_dir = "out";
    bool debug = false;  // write buffer dumps to <output_dir>/debug

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
    /// Throws InputError describing the first out-of-range knob.
    void validate() const;
    /// `key` is a dotted path such as "texture.resolution"; `value` is parsed as JSON when
    /// possible and as a plain string otherwise, then type-checked against the field.
    void apply_override(const std::string& key, const std::string& value);
    /// FNV-1a of the canonical JSON without `output_dir`.
    std::uint64_t hash() const;

    std::vector<Camera> cameras() const;
    bool operator==(const PipelineConfig&) const;
};

struct StageRecord {
    std::string pipeline;  // "stage1" | "stage2" | "retexture"
    std::string stage;
    double seconds = 0.0;
};

struct Provenance {
    std::string prompt;
    std::uint64_t seed = 0;
    nlohmann::json config;  // without output_dir
    std::uint64_t config_hash = 0;
    std::string backend_requested;
    std::string backend_used;
    std::vector<std::string> warnings;
    std::vector<StageRecord> stages;

    /// Deterministic part under "run-independent" keys; timings and the output directory go
    /// under "run" so determinism checks can drop that one key.
    nlohmann::json to_json(const std::string& output_dir) const;
};

struct AssetMetrics {
    double uv_coverage = 0.0;         // fraction of texels in the UV footprint
    double observed_fraction = 0.0;   // fraction of footprint texels seen by some view
    double seam_before = 0.0;         // discontinuity metric before seam repair
    double seam_after = 0.0;
};

struct Asset {
    Mesh mesh;                // with UVs
    Texture texture;          // final 5-channel texture T*
    PBRTextureSet materials;  // split_channels(texture)
    Provenance provenance;
    AssetMetrics metrics;
};

/// Creates the backend named by the config (remote without an endpoint is an InputError).
std::unique_ptr<ViewBackend> make_backend(const PipelineConfig& config);

/// Pipeline entry points. `backend` defaults to the one named in the config. When the
/// configured backend fails, the run continues with the procedural backend and records a
/// warning in the provenance.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, std::unique_ptr<ViewBackend> backend = nullptr);

    const PipelineConfig& config() const { return config_; }

    /// Unconditioned views → TSDF → marching cubes → atlas → bake → fuse → fill → seams.
    Asset stage1_generate(const Prompt& prompt);
    /// Conditioning → conditioned views → bake → fuse → fill → seams → optional upscale.
    /// The mesh is carried over bit-exactly.
    Asset stage2_refine(const Asset& asset, const Prompt& prompt);
    /// stage2 on a bare mesh; an atlas is generated only when the mesh has no UVs.
    Asset retexture(const Mesh& mesh, const Prompt& prompt);

    /// Writes asset.glb and provenance.json into config().output_dir.
    void write(const Asset& asset) const;

private:
    GeneratedViewSet generate_views(const Prompt& prompt, std::span<const Camera> cameras,
                                    const GeometryConditioning* conditioning, Provenance& prov);
    Asset texture_stage(const Mesh& mesh, const Prompt& prompt, const char* pipeline_name, Provenance prov);
    Texture bake_and_consolidate(const Mesh& mesh, const GeneratedViewSet& views, std::span<const Camera> cameras,
                                 const std::vector<RenderedView>* geometry_views, const char* pipeline_name,
                                 Provenance& prov, AssetMetrics& metrics);
    Provenance start_provenance(const Prompt& prompt) const;
    void dump_views(const std::string& tag, const GeneratedViewSet& views) const;

    PipelineConfig config_;
    std::unique_ptr<ViewBackend> backend_;
    ProceduralBackend fallback_;
};

/// Prompt with the config's seed override applied.
Prompt make_prompt(const std::string& text, const PipelineConfig& config);

}  // namespace gen3d

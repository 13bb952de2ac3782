#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <vector>

#include "gen3d/materials.hpp"
#include "gen3d/mesh.hpp"
#include "gen3d/rasterizer.hpp"

namespace gen3d {

/// Text prompt y with the seed that drives every random choice made for it.
struct Prompt {
    std::string text;
    std::uint64_t seed = 0;

    /// Seed defaults to the FNV-1a hash of the text. Throws InputError for blank text.
    static Prompt make(std::string text, std::optional<std::uint64_t> seed = std::nullopt);
};

enum class Pattern { solid, stripes, checker, fbm };
enum class Shape { sphere, cube, torus, capsule };

const char* to_string(Pattern p);
const char* to_string(Shape s);

/// Everything the keyword table extracts from a prompt.
struct PromptStyle {
    Pattern pattern = Pattern::solid;
    Vec3 color_a;  // primary color
    Vec3 color_b;  // secondary color of two-tone patterns
    double roughness = 0.8;
    double metalness = 0.0;
    std::vector<Shape> shapes;  // in order of appearance; empty means "no shape keyword"
    bool palette_from_hash = false;
};

/// One entry of the shipped keyword table.
struct KeywordEntry {
    const char* word;
    enum class Kind { color, pattern, material, shape } kind;
    Vec3 color;
    Pattern pattern = Pattern::solid;
    double roughness = -1.0;  // negative: leave unchanged
    double metalness = -1.0;
    Shape shape = Shape::sphere;
};

std::span<const KeywordEntry> keyword_table();

/// Tokenizes the prompt (lowercase, split on anything that is not a letter) and applies the
/// keyword table. Unrecognized colors fall back to a palette derived from the text hash.
PromptStyle parse_prompt(const Prompt& prompt);

/// Object-space pattern periods.
inline constexpr double kStripePeriod = 0.25;
inline constexpr double kCheckerPeriod = 0.25;
inline constexpr double kNoiseFrequency = 4.0;
inline constexpr int kNoiseLattice = 64;

/// Keyword-driven material field evaluated in object space, so every view of the object
/// sees exactly the same surface values.
class ProceduralMaterial {
public:
    explicit ProceduralMaterial(const Prompt& prompt);

    /// (albedo RGB, roughness, metalness), all in [0,1].
    std::array<double, 5> evaluate(const Vec3& point, const Vec3& normal) const;
    MaterialSample sample(const Vec3& point, const Vec3& normal) const;

    const PromptStyle& style() const { return style_; }
    /// Translation vectors under which the pattern repeats exactly.
    std::vector<Vec3> periods() const;

private:
    double noise(Vec3 p) const;
    double fbm(const Vec3& p) const;

    PromptStyle style_;
    std::array<std::uint8_t, 2 * kNoiseLattice> perm_{};
};

/// Convenience wrapper: ProceduralMaterial(prompt).evaluate(point, normal).
std::array<double, 5> procedural_texture(const Prompt& prompt, const Vec3& point, const Vec3& normal);

/// Translation periods of the prompt's pattern (see ProceduralMaterial::periods).
std::vector<Vec3> pattern_period(const Prompt& prompt);

/// Mesh of the prompt's shapes: one shape is centered; several are laid out along x.
/// Defaults to a sphere of radius 0.4 when the prompt names no shape.
Mesh prompt_geometry(const Prompt& prompt);

/// Per-camera depth, normal and mask buffers rendered from an existing mesh.
/// Only the `depth`, `normal` and `mask` buffers of each view are meaningful.
struct GeometryConditioning {
    std::vector<RenderedView> buffers;
};

GeometryConditioning render_conditioning(const Mesh& mesh, std::span<const Camera> cameras);

/// Views produced by a generator. Every view carries shaded, albedo and material buffers;
/// depth, normal and mask come from the generator in unconditioned mode and are copied
/// from the conditioning otherwise.
struct GeneratedViewSet {
    std::vector<RenderedView> views;
    bool conditioned = false;
};

/// Throws InputError unless `views` matches `cameras` in count and resolution and every view
/// has the buffers its mode requires.
void check_view_set(const GeneratedViewSet& set, std::span<const Camera> cameras);

/// The place where a multi-view diffusion model would sit.
/// Implementations must be safe to call concurrently.
class ViewBackend {
public:
    virtual ~ViewBackend() = default;
    virtual std::string name() const = 0;
    virtual GeneratedViewSet generate(const Prompt& prompt, std::span<const Camera> cameras,
                                      const GeometryConditioning* conditioning) = 0;
};

struct ProceduralSettings {
    double jitter = 0.0;  // σ: per-view, per-channel color offset amplitude
    LightConfig light;
};

/// Seeded procedural generator. Unconditioned calls rasterize the prompt's primitive;
/// conditioned calls paint the conditioning surface. Colors come from ProceduralMaterial.
class ProceduralBackend final : public ViewBackend {
public:
    explicit ProceduralBackend(ProceduralSettings settings = {}) : settings_(settings) {}

    std::string name() const override { return "procedural"; }
    GeneratedViewSet generate(const Prompt& prompt, std::span<const Camera> cameras,
                              const GeometryConditioning* conditioning) override;

    /// The per-channel unit offsets u ∈ [-1,1]³ used for view `index`; the applied offset is σ·u.
    static Vec3 jitter_direction(std::uint64_t seed, std::size_t index);

private:
    ProceduralSettings settings_;
};

/// Environment variables read by `RemoteSettings::from_env`.
inline constexpr const char* kEndpointEnv = "GEN3D_ENDPOINT";
inline constexpr const char* kTokenEnv = "GEN3D_TOKEN";

struct RemoteSettings {
    std::string endpoint;      // "http://host:port[/prefix]"
    std::string bearer_token;  // optional
    double timeout_s = 30.0;
    int retries = 2;
    int max_in_flight = 2;
    std::filesystem::path record_dir;  // raw responses are written here when set

    /// Endpoint and token from the environment; everything else at its default.
    static RemoteSettings from_env();
};

/// Request body for POST /v1/generate_views.
std::string encode_generate_request(const Prompt& prompt, std::span<const Camera> cameras,
                                    const GeometryConditioning* conditioning);
/// Parses a response body; throws BackendError on protocol violations. Besides the required
/// images a view may carry `material_png_b64` (R roughness, G metalness) and, when
/// unconditioned, `normal_png_b64` (0.5·n + 0.5); missing materials use kDefaultMaterial.
GeneratedViewSet decode_generate_response(std::string_view body, std::span<const Camera> cameras,
                                          const GeometryConditioning* conditioning);

/// Depth ↔ 16-bit PNG: 0 means no depth, otherwise 1 + round((d − near) / (far − near) · 65534).
std::vector<std::uint8_t> encode_depth_png(const Image& depth, const Camera& camera);
Image decode_depth_png(std::span<const std::uint8_t> png, const Camera& camera);

/// JSON-over-HTTP client. Retries transport errors and 5xx responses; 4xx responses and
/// malformed bodies fail immediately. At most `max_in_flight` requests run at once.
class RemoteBackend final : public ViewBackend {
public:
    explicit RemoteBackend(RemoteSettings settings);

    std::string name() const override { return "remote"; }
    GeneratedViewSet generate(const Prompt& prompt, std::span<const Camera> cameras,
                              const GeometryConditioning* conditioning) override;

    /// Makes pending and future calls fail fast.
    void cancel() { cancelled_ = true; }
    std::string last_raw_response() const;

private:
    RemoteSettings settings_;
    std::counting_semaphore<64> in_flight_;
    std::atomic<bool> cancelled_{false};
    std::atomic<int> call_counter_{0};
    mutable std::mutex mutex_;
    std::string last_raw_;
};

/// Replays responses recorded by RemoteBackend (`response_<n>.json`, in call order).
class ReplayBackend final : public ViewBackend {
public:
    explicit ReplayBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string name() const override { return "replay"; }
    GeneratedViewSet generate(const Prompt& prompt, std::span<const Camera> cameras,
                              const GeometryConditioning* conditioning) override;

private:
    std::filesystem::path dir_;
    std::atomic<int> call_counter_{0};
};

}  // namespace gen3d

#include "gen3d/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "gen3d/error.hpp"
#include "gen3d/gltf.hpp"
#include "gen3d/image.hpp"
#include "gen3d/parallel.hpp"

namespace gen3d {

using json = nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Checks `given` against the shape of the defaults: same keys, compatible leaf types.
void check_shape(const json& given, const json& reference, const std::string& path) {
    auto fail = [&](const std::string& why) { throw InputError("config " + (path.empty() ? "root" : path) + ": " + why); };
    if (path == "seed") {
        if (!given.is_null() && !given.is_number_unsigned() && !(given.is_number_integer() && given.get<long long>() >= 0)) {
            fail("expected null or a non-negative integer");
        }
        return;
    }
    if (reference.is_object()) {
        if (!given.is_object()) {
            fail("expected an object");
        }
        for (const auto& [key, value] : given.items()) {
            if (!reference.contains(key)) {
                fail("unknown key '" + key + "'");
            }
            check_shape(value, reference[key], path.empty() ? key : path + "." + key);
        }
        return;
    }
    if (reference.is_array()) {
        if (!given.is_array() || given.size() != reference.size()) {
            fail("expected an array of " + std::to_string(reference.size()) + " numbers");
        }
        for (const auto& v : given) {
            if (!v.is_number()) {
                fail("expected numbers");
            }
        }
        return;
    }
    if (reference.is_boolean() && !given.is_boolean()) {
        fail("expected a boolean");
    }
    if (reference.is_string() && !given.is_string()) {
        fail("expected a string");
    }
    if (reference.is_number_float() && !given.is_number()) {
        fail("expected a number");
    }
    if ((reference.is_number_integer() || reference.is_number_unsigned()) && !reference.is_number_float() &&
        !(given.is_number_integer() || given.is_number_unsigned())) {
        fail("expected an integer");
    }
}

void overlay(json& base, const json& patch) {
    for (const auto& [key, value] : patch.items()) {
        if (value.is_object() && base.contains(key) && base[key].is_object()) {
            overlay(base[key], value);
        } else {
            base[key] = value;
        }
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InputError("config: " + what);
    }
}

template <typename F>
auto run_stage(Provenance& prov, const char* pipeline, const char* stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto result = fn();
        prov.stages.push_back(
            {pipeline, stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
        return result;
    } catch (const StageError&) {
        throw;
    } catch (const InputError& e) {
        throw StageError(stage, e.what(), true);
    } catch (const std::exception& e) {
        throw StageError(stage, e.what(), false);
    }
}

std::vector<std::uint8_t> texture_png(const Texture& tex, int first_channel, int count) {
    Image img(tex.size, tex.size, count);
    for (std::size_t i = 0; i < tex.texel_count(); ++i) {
        for (int c = 0; c < count; ++c) {
            img.data[i * count + c] = tex.pixels[i * tex.channels + first_channel + c];
        }
    }
    return encode_png8(img, count == 2 ? 3 : count);
}

}  // namespace

// ---------------------------------------------------------------------------------------
// Configuration

json PipelineConfig::to_json() const {
    return {
        {"views",
         {{"count", views.count},
          {"elevation_deg", views.elevation_deg},
          {"elevation_pattern", views.elevation_pattern},
          {"radius", views.radius},
          {"fov_deg", views.fov_deg},
          {"resolution", views.resolution}}},
        {"sdf",
         {{"resolution", sdf.resolution},
          {"truncation_cells", sdf.truncation_cells},
          {"carve_weight", sdf.carve_weight},
          {"min_weight", sdf.min_weight},
          {"iso", sdf.iso}}},
        {"atlas", {{"theta_max_deg", atlas.theta_max_deg}, {"padding", atlas.padding}}},
        {"texture",
         {{"resolution", texture.resolution},
          {"confidence_exponent", texture.confidence_exponent},
          {"confidence_floor", texture.confidence_floor},
          {"depth_tolerance", texture.depth_tolerance},
          {"hole_padding", texture.hole_padding}}},
        {"seams",
         {{"iterations", seams.iterations},
          {"relaxation", seams.relaxation},
          {"samples_per_texel", seams.samples_per_texel}}},
        {"upscale_factor", upscale_factor},
        {"backend",
         {{"kind", backend.kind},
          {"jitter", backend.jitter},
          {"endpoint", backend.endpoint},
          {"timeout_s", backend.timeout_s},
          {"retries", backend.retries},
          {"max_in_flight", backend.max_in_flight},
          {"replay_dir", backend.replay_dir}}},
        {"light",
         {{"direction", vec_json(light.direction)},
          {"intensity", vec_json(light.intensity)},
          {"ambient", vec_json(light.ambient)}}},
        {"seed", seed ? json(*seed) : json(nullptr)},
        {"output_dir", output_dir},
        {"debug", debug},
    };
}

PipelineConfig PipelineConfig::from_json(const json& given) {
    const json defaults = PipelineConfig{}.to_json();
    check_shape(given, defaults, "");
    json j = defaults;
    overlay(j, given);

    PipelineConfig c;
    const json& v = j["views"];
    c.views = {v["count"].get<int>(),   v["elevation_deg"].get<double>(), v["elevation_pattern"].get<std::string>(),
               v["radius"].get<double>(), v["fov_deg"].get<double>(),       v["resolution"].get<int>()};
    const json& s = j["sdf"];
    c.sdf = {s["resolution"].get<int>(), s["truncation_cells"].get<double>(), s["carve_weight"].get<double>(),
             s["min_weight"].get<double>(), s["iso"].get<double>()};
    c.atlas = {j["atlas"]["theta_max_deg"].get<double>(), j["atlas"]["padding"].get<int>()};
    const json& t = j["texture"];
    c.texture = {t["resolution"].get<int>(), t["confidence_exponent"].get<double>(), t["confidence_floor"].get<double>(),
                 t["depth_tolerance"].get<double>(), t["hole_padding"].get<int>()};
    c.seams = {j["seams"]["iterations"].get<int>(), j["seams"]["relaxation"].get<double>(),
               j["seams"]["samples_per_texel"].get<double>()};
    c.upscale_factor = j["upscale_factor"].get<int>();
    const json& b = j["backend"];
    c.backend = {b["kind"].get<std::string>(), b["jitter"].get<double>(),  b["endpoint"].get<std::string>(),
                 b["timeout_s"].get<double>(),  b["retries"].get<int>(),   b["max_in_flight"].get<int>(),
                 b["replay_dir"].get<std::string>()};
    c.light.direction = json_vec(j["light"]["direction"]);
    c.light.intensity = json_vec(j["light"]["intensity"]);
    c.light.ambient = json_vec(j["light"]["ambient"]);
    if (!j["seed"].is_null()) {
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.output_dir = j["output_dir"].get<std::string>();
    c.debug = j["debug"].get<bool>();
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    require(views.count >= 1 && views.count <= 64, "views.count must be in [1, 64]");
    require(std::abs(views.elevation_deg) < 89.0, "views.elevation_deg must be in (-89, 89)");
    require(views.elevation_pattern == "alternating" || views.elevation_pattern == "ring",
            "views.elevation_pattern must be alternating or ring");
    require(views.radius > 1.0 && views.radius < 100.0, "views.radius must be in (1, 100)");
    require(views.fov_deg > 0.0 && views.fov_deg < 180.0, "views.fov_deg must be in (0, 180)");
    require(views.resolution >= 16 && views.resolution <= 4096, "views.resolution must be in [16, 4096]");
    require(sdf.resolution >= 8 && sdf.resolution <= 512, "sdf.resolution must be in [8, 512]");
    require(sdf.truncation_cells > 0.0 && sdf.truncation_cells <= 16.0, "sdf.truncation_cells must be in (0, 16]");
    require(sdf.carve_weight >= 0.0, "sdf.carve_weight must be ≥ 0");
    require(sdf.min_weight >= 0.0, "sdf.min_weight must be ≥ 0");
    require(std::abs(sdf.iso) < sdf.truncation_cells / (sdf.resolution - 5),
            "sdf.iso must lie strictly within (-τ, τ)");
    require(atlas.theta_max_deg > 0.0 && atlas.theta_max_deg < 90.0, "atlas.theta_max_deg must be in (0, 90)");
    require(atlas.padding >= 0 && atlas.padding <= 64, "atlas.padding must be in [0, 64]");
    require(is_power_of_two(texture.resolution) && texture.resolution >= 16 && texture.resolution <= 4096,
            "texture.resolution must be a power of two in [16, 4096]");
    require(texture.confidence_exponent > 0.0, "texture.confidence_exponent must be > 0");
    require(texture.confidence_floor >= 0.0 && texture.confidence_floor <= 1.0,
            "texture.confidence_floor must be in [0, 1]");
    require(texture.depth_tolerance > 0.0, "texture.depth_tolerance must be > 0");
    require(texture.hole_padding >= 0 && texture.hole_padding <= 64, "texture.hole_padding must be in [0, 64]");
    require(seams.iterations >= 0 && seams.iterations <= 1000, "seams.iterations must be in [0, 1000]");
    require(seams.relaxation >= 0.0 && seams.relaxation <= 1.0, "seams.relaxation must be in [0, 1]");
    require(seams.samples_per_texel > 0.0 && seams.samples_per_texel <= 16.0,
            "seams.samples_per_texel must be in (0, 16]");
    require(upscale_factor == 1 || upscale_factor == 2 || upscale_factor == 4, "upscale_factor must be 1, 2 or 4");
    require(texture.resolution * upscale_factor <= 4096, "texture.resolution × upscale_factor must not exceed 4096");
    require(backend.kind == "procedural" || backend.kind == "remote" || backend.kind == "replay",
            "backend.kind must be procedural, remote or replay");
    require(backend.jitter >= 0.0 && backend.jitter <= 1.0, "backend.jitter must be in [0, 1]");
    require(backend.timeout_s > 0.0, "backend.timeout_s must be > 0");
    require(backend.retries >= 0 && backend.retries <= 10, "backend.retries must be in [0, 10]");
    require(backend.max_in_flight >= 1 && backend.max_in_flight <= 64, "backend.max_in_flight must be in [1, 64]");
    require(std::abs(length(light.direction) - 1.0) < 1e-6, "light.direction must be a unit vector");
    for (const Vec3& c : {light.intensity, light.ambient}) {
        require(c.x >= 0.0 && c.y >= 0.0 && c.z >= 0.0, "light intensities must be ≥ 0");
    }
    require(!output_dir.empty(), "output_dir must not be empty");
}

void PipelineConfig::apply_override(const std::string& key, const std::string& value) {
    json j = to_json();
    json* node = &j;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!node->is_object() || !node->contains(part)) {
            throw InputError("unknown config key '" + key + "'");
        }
        node = &(*node)[part];
    }
    if (node->is_object()) {
        throw InputError("config key '" + key + "' is a section, not a value");
    }
    json parsed;
    if (node->is_string()) {
        parsed = value;
    } else {
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            throw InputError("config key '" + key + "': cannot parse '" + value + "'");
        }
    }
    *node = parsed;
    *this = from_json(j);
}

std::uint64_t PipelineConfig::hash() const {
    json j = to_json();
    j.erase("output_dir");
    return fnv1a64(j.dump());
}

std::vector<Camera> PipelineConfig::cameras() const {
    return canonical_cameras(views.count, views.elevation_deg, views.radius, views.resolution, views.fov_deg,
                             views.elevation_pattern == "ring" ? ElevationPattern::ring : ElevationPattern::alternating);
}

bool PipelineConfig::operator==(const PipelineConfig& o) const { return to_json() == o.to_json(); }

json Provenance::to_json(const std::string& output_dir) const {
    json stage_list = json::array();
    json timings = json::array();
    double total = 0.0;
    for (const StageRecord& s : stages) {
        stage_list.push_back({{"pipeline", s.pipeline}, {"stage", s.stage}});
        timings.push_back({{"pipeline", s.pipeline}, {"stage", s.stage}, {"seconds", s.seconds}});
        total += s.seconds;
    }
    return {{"prompt", prompt},
            {"seed", seed},
            {"config", config},
            {"config_hash", hex64(config_hash)},
            {"backend", {{"requested", backend_requested}, {"used", backend_used}}},
            {"warnings", warnings},
            {"stages", stage_list},
            {"run", {{"output_dir", output_dir}, {"timings", timings}, {"total_seconds", total}}}};
}

Prompt make_prompt(const std::string& text, const PipelineConfig& config) { return Prompt::make(text, config.seed); }

std::unique_ptr<ViewBackend> make_backend(const PipelineConfig& config) {
    if (config.backend.kind == "remote") {
        RemoteSettings s = RemoteSettings::from_env();
        if (!config.backend.endpoint.empty()) {
            s.endpoint = config.backend.endpoint;
        }
        if (s.endpoint.empty()) {
            throw InputError(std::string("remote backend needs backend.endpoint or $") + kEndpointEnv);
        }
        s.timeout_s = config.backend.timeout_s;
        s.retries = config.backend.retries;
        s.max_in_flight = config.backend.max_in_flight;
        if (config.debug) {
            s.record_dir = std::filesystem::path(config.output_dir) / "debug" / "responses";
        }
        return std::make_unique<RemoteBackend>(std::move(s));
    }
    if (config.backend.kind == "replay") {
        if (config.backend.replay_dir.empty()) {
            throw InputError("replay backend needs backend.replay_dir");
        }
        return std::make_unique<ReplayBackend>(config.backend.replay_dir);
    }
    return std::make_unique<ProceduralBackend>(ProceduralSettings{config.backend.jitter, config.light});
}

// ---------------------------------------------------------------------------------------
// Pipeline

Pipeline::Pipeline(PipelineConfig config, std::unique_ptr<ViewBackend> backend)
    : config_(std::move(config)), fallback_(ProceduralSettings{config_.backend.jitter, config_.light}) {
    config_.validate();
    backend_ = backend ? std::move(backend) : make_backend(config_);
}

Provenance Pipeline::start_provenance(const Prompt& prompt) const {
    Provenance p;
    p.prompt = prompt.text;
    p.seed = prompt.seed;
    p.config = config_.to_json();
    p.config.erase("output_dir");
    p.config_hash = config_.hash();
    p.backend_requested = backend_->name();
    p.backend_used = backend_->name();
    return p;
}

GeneratedViewSet Pipeline::generate_views(const Prompt& prompt, std::span<const Camera> cameras,
                                          const GeometryConditioning* conditioning, Provenance& prov) {
    if (dynamic_cast<ProceduralBackend*>(backend_.get()) != nullptr) {
        GeneratedViewSet set = backend_->generate(prompt, cameras, conditioning);
        check_view_set(set, cameras);
        return set;
    }
    try {
        GeneratedViewSet set = backend_->generate(prompt, cameras, conditioning);
        check_view_set(set, cameras);
        return set;
    } catch (const std::exception& e) {
        const std::string warning =
            backend_->name() + " backend failed (" + e.what() + "); falling back to the procedural backend";
        std::cerr << "warning: " << warning << '\n';
        prov.warnings.push_back(warning);
        prov.backend_used = fallback_.name();
        return fallback_.generate(prompt, cameras, conditioning);
    }
}

void Pipeline::dump_views(const std::string& tag, const GeneratedViewSet& set) const {
    if (!config_.debug) {
        return;
    }
    const auto dir = std::filesystem::path(config_.output_dir) / "debug";
    for (std::size_t i = 0; i < set.views.size(); ++i) {
        const RenderedView& v = set.views[i];
        const std::string stem = tag + "_view" + std::to_string(i);
        write_file(dir / (stem + "_shaded.png"), encode_png8(v.shaded, 3));
        write_file(dir / (stem + "_albedo.png"), encode_png8(v.albedo, 3));
        Image mask(v.resolution, v.resolution, 1);
        std::vector<float> depth(v.mask.size(), 0.0f);
        for (std::size_t k = 0; k < v.mask.size(); ++k) {
            mask.data[k] = v.mask[k] != 0 ? 1.0f : 0.0f;
            if (v.mask[k] != 0) {
                depth[k] = static_cast<float>(v.depth.data[k] / config_.views.radius / 2.0);
            }
        }
        write_file(dir / (stem + "_mask.png"), encode_png8(mask, 1));
        write_file(dir / (stem + "_depth.png"), encode_png16_gray(depth, v.resolution, v.resolution));
    }
}

Texture Pipeline::bake_and_consolidate(const Mesh& mesh, const GeneratedViewSet& set, std::span<const Camera> cameras,
                                       const std::vector<RenderedView>* geometry_views, const char* pipeline_name,
                                       Provenance& prov, AssetMetrics& metrics) {
    const int size = config_.texture.resolution;
    const BakeSettings bake{5, config_.texture.depth_tolerance, config_.texture.confidence_exponent};

    auto partials = run_stage(prov, pipeline_name, "bake_views", [&] {
        std::vector<PartialTexture> out(set.views.size());
        parallel_for(set.views.size(), [&](std::size_t k) {
            if (geometry_views == nullptr) {
                out[k] = bake_view_to_partial(mesh, set.views[k], cameras[k], size, static_cast<int>(k), bake);
                return;
            }
            // Colors from the generated view, visibility from the reconstructed surface.
            RenderedView view = set.views[k];
            const RenderedView& geom = (*geometry_views)[k];
            view.depth = geom.depth;
            view.normal = geom.normal;
            for (std::size_t i = 0; i < view.mask.size(); ++i) {
                view.mask[i] = (view.mask[i] != 0 && geom.mask[i] != 0) ? 1 : 0;
                if (view.mask[i] == 0) {
                    view.depth.data[i] = kNoDepth;
                }
            }
            out[k] = bake_view_to_partial(mesh, view, cameras[k], size, static_cast<int>(k), bake);
        });
        return out;
    });

    Texture fused = run_stage(prov, pipeline_name, "fuse_partials",
                              [&] { return fuse_partials(partials, config_.texture.confidence_floor); });
    std::size_t in_footprint = 0, observed = 0;
    for (std::size_t i = 0; i < fused.texel_count(); ++i) {
        in_footprint += fused.in_footprint(i) ? 1 : 0;
        observed += (fused.in_footprint(i) && fused.coverage[i] != 0) ? 1 : 0;
    }
    metrics.uv_coverage = static_cast<double>(in_footprint) / static_cast<double>(fused.texel_count());
    metrics.observed_fraction = in_footprint > 0 ? static_cast<double>(observed) / static_cast<double>(in_footprint) : 0.0;

    Texture filled =
        run_stage(prov, pipeline_name, "fill_holes", [&] { return fill_holes(fused, config_.texture.hole_padding); });

    Texture repaired = run_stage(prov, pipeline_name, "fix_seams", [&] {
        const SeamEdgeList seams = find_seam_edges(mesh, uv_islands(mesh));
        std::vector<double> trace;
        Texture t = fix_seams(mesh, seams, filled,
                              {config_.seams.iterations, config_.seams.relaxation, config_.seams.samples_per_texel},
                              &trace);
        metrics.seam_before = trace.front();
        metrics.seam_after = trace.back();
        return t;
    });

    if (config_.debug) {
        const auto dir = std::filesystem::path(config_.output_dir) / "debug";
        const std::string stem = pipeline_name;
        write_file(dir / (stem + "_fused_albedo.png"), texture_png(fused, 0, 3));
        write_file(dir / (stem + "_albedo.png"), texture_png(repaired, 0, 3));
        write_file(dir / (stem + "_roughness_metalness.png"), texture_png(repaired, 3, 2));
        if (!fused.confidence.empty()) {
            write_file(dir / (stem + "_confidence.png"), encode_png16_gray(fused.confidence, size, size));
        }
    }
    return repaired;
}

Asset Pipeline::stage1_generate(const Prompt& prompt) {
    if (prompt.text.empty()) {
        throw InputError("prompt text must not be empty");
    }
    Provenance prov = start_provenance(prompt);
    const std::vector<Camera> cams = config_.cameras();
    constexpr const char* kName = "stage1";

    const GeneratedViewSet views =
        run_stage(prov, kName, "generate_views", [&] { return generate_views(prompt, cams, nullptr, prov); });
    dump_views(kName, views);

    const SDFGrid grid = run_stage(prov, kName, "fuse_views_to_sdf", [&] {
        return fuse_views_to_sdf(views.views, cams,
                                 {config_.sdf.resolution, config_.sdf.truncation_cells, config_.sdf.carve_weight, 1.0});
    });
    if (config_.debug) {
        dump_sdf(grid, std::filesystem::path(config_.output_dir) / "debug" / "sdf");
    }

    const Mesh surface = run_stage(prov, kName, "marching_cubes",
                                   [&] { return marching_cubes(grid, config_.sdf.iso, config_.sdf.min_weight); });

    const AtlasResult atlas = run_stage(prov, kName, "generate_atlas", [&] {
        return generate_atlas(surface, {config_.atlas.theta_max_deg, config_.atlas.padding});
    });

    // Baking needs visibility against the reconstructed surface, not the generator's depth.
    std::vector<RenderedView> geometry(cams.size());
    parallel_for(cams.size(), [&](std::size_t k) { geometry[k] = rasterize(atlas.mesh, cams[k], nullptr, config_.light); });

    Asset asset;
    asset.texture = bake_and_consolidate(atlas.mesh, views, cams, &geometry, kName, prov, asset.metrics);
    asset.mesh = atlas.mesh;
    asset.materials = split_channels(asset.texture);
    asset.provenance = std::move(prov);
    return asset;
}

Asset Pipeline::texture_stage(const Mesh& mesh, const Prompt& prompt, const char* pipeline_name, Provenance prov) {
    const std::uint64_t mesh_before = mesh_hash(mesh);
    const std::vector<Camera> cams = config_.cameras();

    const GeometryConditioning cond =
        run_stage(prov, pipeline_name, "render_conditioning", [&] { return render_conditioning(mesh, cams); });
    const GeneratedViewSet views =
        run_stage(prov, pipeline_name, "generate_views", [&] { return generate_views(prompt, cams, &cond, prov); });
    dump_views(pipeline_name, views);

    Asset asset;
    asset.texture = bake_and_consolidate(mesh, views, cams, nullptr, pipeline_name, prov, asset.metrics);
    if (config_.upscale_factor > 1) {
        asset.texture =
            run_stage(prov, pipeline_name, "upscale", [&] { return upscale(asset.texture, config_.upscale_factor); });
    }
    asset.mesh = mesh;
    if (mesh_hash(asset.mesh) != mesh_before) {
        throw std::logic_error("internal error: texture stage modified the mesh");
    }
    asset.materials = split_channels(asset.texture);
    asset.provenance = std::move(prov);
    return asset;
}

Asset Pipeline::stage2_refine(const Asset& asset, const Prompt& prompt) {
    if (!asset.mesh.has_uv()) {
        throw InputError("stage2_refine: asset mesh has no UVs");
    }
    Provenance prov = asset.provenance.prompt.empty() ? start_provenance(prompt) : asset.provenance;
    return texture_stage(asset.mesh, prompt, "stage2", std::move(prov));
}

Asset Pipeline::retexture(const Mesh& mesh, const Prompt& prompt) {
    const ValidationReport report = validate_mesh(mesh);
    if (report.out_of_range_indices > 0 || report.out_of_range_uvs > 0 || mesh.empty()) {
        throw InputError("retexture: invalid mesh (" + std::to_string(report.out_of_range_indices) +
                         " out-of-range indices, " + std::to_string(report.out_of_range_uvs) + " out-of-range UVs)");
    }
    Provenance prov = start_provenance(prompt);
    if (mesh.has_uv()) {
        return texture_stage(mesh, prompt, "retexture", std::move(prov));
    }
    const Mesh unwrapped = run_stage(prov, "retexture", "generate_atlas", [&] {
        return generate_atlas(mesh, {config_.atlas.theta_max_deg, config_.atlas.padding}).mesh;
    });
    return texture_stage(unwrapped, prompt, "retexture", std::move(prov));
}

void Pipeline::write(const Asset& asset) const {
    const std::filesystem::path dir = config_.output_dir;
    write_file(dir / "asset.glb", save_gltf(asset.mesh, &asset.materials));
    write_file(dir / "provenance.json", asset.provenance.to_json(config_.output_dir).dump(2) + "\n");
}

}  // namespace gen3d

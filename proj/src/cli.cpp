#include "gen3d/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gen3d/error.hpp"
#include "gen3d/gltf.hpp"
#include "gen3d/image.hpp"
#include "gen3d/pipeline.hpp"

namespace gen3d {

namespace {

using json = nlohmann::json;

void flatten_keys(const json& j, const std::string& prefix, std::vector<std::string>& out) {
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten_keys(value, path, out);
        } else {
            out.push_back(path);
        }
    }
}

std::string config_key_list() {
    std::vector<std::string> keys;
    flatten_keys(PipelineConfig{}.to_json(), "", keys);
    std::string text = "\nConfig keys accepted by --set key=value:\n";
    for (const auto& k : keys) {
        text += "  " + k + "\n";
    }
    return text;
}

json read_json_file(const std::string& path) {
    const auto bytes = read_file(path);
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
}

/// Options shared by every pipeline-running subcommand.
struct RunOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::string backend;
    bool debug = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON config file (any subset of the config keys)");
        cmd->add_option("--set", overrides, "Config override key=value (dotted key, repeatable)");
        cmd->add_option("-o,--output", output_dir, "Output directory (config key output_dir)");
        cmd->add_option("--seed", seed, "Seed override (config key seed)");
        cmd->add_option("--backend", backend, "View backend: procedural, remote or replay (config key backend.kind)");
        cmd->add_flag("--debug", debug, "Write buffer dumps to <output>/debug");
    }

    PipelineConfig build(const json* base = nullptr) const {
        PipelineConfig config;
        if (base != nullptr) {
            config = PipelineConfig::from_json(*base);
        }
        if (!config_path.empty()) {
            config = PipelineConfig::from_json(read_json_file(config_path));
        }
        for (const std::string& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw InputError("override '" + o + "' is not of the form key=value");
            }
            config.apply_override(o.substr(0, eq), o.substr(eq + 1));
        }
        if (!output_dir.empty()) {
            config.output_dir = output_dir;
        }
        if (seed) {
            config.seed = seed;
        }
        if (!backend.empty()) {
            config.apply_override("backend.kind", backend);
        }
        if (debug) {
            config.debug = true;
        }
        config.validate();
        return config;
    }
};

Mesh load_mesh_any(const std::string& path) {
    try {
        if (path.size() >= 4 && path.substr(path.size() - 4) == ".glb") {
            return load_glb(read_file(path)).mesh;
        }
        return load_obj_file(path);
    } catch (const InputError& e) {
        const std::string what = e.what();
        throw InputError(what.find(path) == std::string::npos ? path + ": " + what : what);
    }
}

void report_stages(const Asset& asset, std::ostream& err) {
    double total = 0.0;
    for (const StageRecord& s : asset.provenance.stages) {
        err << "  " << s.pipeline << " " << s.stage << " " << s.seconds << " s\n";
        total += s.seconds;
    }
    err << "  total " << total << " s\n";
    for (const std::string& w : asset.provenance.warnings) {
        err << "warning: " << w << '\n';
    }
}

Camera camera_from_json(const json& j) {
    auto vec = [&](const char* key, Vec3 fallback) {
        if (!j.contains(key)) {
            return fallback;
        }
        const json& a = j.at(key);
        return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    };
    Camera c;
    c.position = vec("position", c.position);
    c.target = vec("target", c.target);
    c.up = vec("up", c.up);
    c.fov_deg = j.value("fov", c.fov_deg);
    c.resolution = j.value("resolution", c.resolution);
    c.near_plane = j.value("near", c.near_plane);
    c.far_plane = j.value("far", c.far_plane);
    c.validate();
    return c;
}

Image load_png_channels(const std::filesystem::path& path, int channels, int res) {
    const Image img = decode_png_float(read_file(path));
    if (img.width != res || img.height != res || img.channels < channels) {
        throw InputError(path.string() + ": expected a " + std::to_string(res) + "x" + std::to_string(res) +
                         " image with at least " + std::to_string(channels) + " channels");
    }
    Image out(res, res, channels);
    for (std::size_t i = 0; i < static_cast<std::size_t>(res) * res; ++i) {
        for (int c = 0; c < channels; ++c) {
            out.data[i * channels + c] = img.data[i * img.channels + c];
        }
    }
    return out;
}

/// views.json: {"views": [{"camera": {...}, "albedo": "a.png", "material"?: "m.png",
/// "depth"?: "d.png", "mask"?: "mask.png"}]}. Paths are relative to the file. Depth and mask
/// default to a rendering of the mesh itself.
int run_bake(const std::string& mesh_path, const std::string& views_path, const RunOptions& opts, std::ostream& err) {
    const PipelineConfig config = opts.build();
    Mesh mesh = load_mesh_any(mesh_path);
    const json doc = read_json_file(views_path);
    if (!doc.contains("views") || !doc["views"].is_array() || doc["views"].empty()) {
        throw InputError(views_path + ": expected a non-empty \"views\" array");
    }
    const std::filesystem::path base = std::filesystem::path(views_path).parent_path();
    if (!mesh.has_uv()) {
        mesh = generate_atlas(mesh, {config.atlas.theta_max_deg, config.atlas.padding}).mesh;
    }
    std::vector<Camera> cameras;
    std::vector<PartialTexture> partials;
    const BakeSettings bake{5, config.texture.depth_tolerance, config.texture.confidence_exponent};
    for (std::size_t i = 0; i < doc["views"].size(); ++i) {
        const json& v = doc["views"][i];
        const Camera cam = camera_from_json(v.at("camera"));
        RenderedView view = rasterize(mesh, cam, nullptr, config.light);
        view.albedo = load_png_channels(base / v.at("albedo").get<std::string>(), 3, cam.resolution);
        if (v.contains("material")) {
            view.material = load_png_channels(base / v["material"].get<std::string>(), 2, cam.resolution);
        } else {
            for (std::size_t k = 0; k < view.material.data.size(); k += 2) {
                view.material.data[k] = static_cast<float>(kDefaultMaterial.roughness);
                view.material.data[k + 1] = static_cast<float>(kDefaultMaterial.metalness);
            }
        }
        if (v.contains("depth")) {
            view.depth = decode_depth_png(read_file(base / v["depth"].get<std::string>()), cam);
        }
        if (v.contains("mask")) {
            const Image mask = load_png_channels(base / v["mask"].get<std::string>(), 1, cam.resolution);
            for (std::size_t k = 0; k < view.mask.size(); ++k) {
                view.mask[k] = mask.data[k] > 0.5f && std::isfinite(view.depth.data[k]) ? 1 : 0;
                if (view.mask[k] == 0) {
                    view.depth.data[k] = kNoDepth;
                }
            }
        }
        partials.push_back(
            bake_view_to_partial(mesh, view, cam, config.texture.resolution, static_cast<int>(i), bake));
    }
    Texture tex = fuse_partials(partials, config.texture.confidence_floor);
    tex = fill_holes(tex, config.texture.hole_padding);
    tex = fix_seams(mesh, find_seam_edges(mesh, uv_islands(mesh)), tex,
                    {config.seams.iterations, config.seams.relaxation, config.seams.samples_per_texel});
    const PBRTextureSet materials = split_channels(tex);
    const std::filesystem::path out = std::filesystem::path(config.output_dir) / "asset.glb";
    write_file(out, save_gltf(mesh, &materials));
    err << "wrote " << out.string() << '\n';
    return 0;
}

int run_inspect(const std::string& path, std::ostream& out) {
    Mesh mesh;
    int texture_resolution = 0;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".glb") {
        GltfAsset asset = load_glb(read_file(path));
        mesh = std::move(asset.mesh);
        texture_resolution = asset.materials ? asset.materials->size : 0;
    } else {
        mesh = load_mesh_any(path);
    }
    json report = {{"path", path},
                   {"vertices", mesh.vertices.size()},
                   {"faces", mesh.faces.size()},
                   {"has_uv", mesh.has_uv()},
                   {"texture_resolution", texture_resolution}};
    if (mesh.has_uv()) {
        const int size = texture_resolution > 0 ? texture_resolution : kAtlasReferenceResolution;
        const auto islands = uv_islands(mesh);
        report["uv_coverage"] = uv_coverage(mesh, size);
        report["uv_islands"] = islands.size();
        report["seam_count"] = find_seam_edges(mesh, islands).size();
    } else {
        report["uv_coverage"] = 0.0;
        report["uv_islands"] = 0;
        report["seam_count"] = 0;
    }
    out << report.dump(2) << '\n';
    return 0;
}

int run_validate(const std::string& path, std::ostream& out) {
    const Mesh mesh = load_mesh_any(path);
    const ValidationReport r = validate_mesh(mesh);
    const json report = {{"path", path},
                         {"out_of_range_indices", r.out_of_range_indices},
                         {"degenerate_faces", r.degenerate_faces},
                         {"out_of_range_uvs", r.out_of_range_uvs},
                         {"non_manifold_edges", r.non_manifold_edges},
                         {"pass", r.pass}};
    out << report.dump(2) << '\n';
    return r.pass ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-stage text-to-3D asset pipeline with pluggable view generators", "gen3d"};
    app.require_subcommand(1);
    app.footer(config_key_list());

    CLI::App* generate = app.add_subcommand("generate", "Stage I then Stage II: prompt to textured asset");
    RunOptions gen_opts;
    std::string gen_prompt, replay_path;
    bool stage1_only = false;
    generate->add_option("-p,--prompt", gen_prompt, "Text prompt");
    generate->add_flag("--stage1-only", stage1_only, "Stop after Stage I");
    generate->add_option("--replay", replay_path, "Re-run the prompt and config recorded in a provenance.json");
    gen_opts.attach(generate);

    CLI::App* retexture = app.add_subcommand("retexture", "Stage II on an existing mesh (OBJ or GLB)");
    RunOptions re_opts;
    std::string re_mesh, re_prompt;
    retexture->add_option("-m,--mesh", re_mesh, "Input mesh")->required();
    retexture->add_option("-p,--prompt", re_prompt, "Text prompt")->required();
    re_opts.attach(retexture);

    CLI::App* bake = app.add_subcommand("bake", "Atlas (if needed), bake and fuse explicit views onto a mesh");
    RunOptions bake_opts;
    std::string bake_mesh, bake_views;
    bake->add_option("-m,--mesh", bake_mesh, "Input mesh")->required();
    bake->add_option("--views", bake_views, "views.json describing cameras and images")->required();
    bake_opts.attach(bake);

    CLI::App* inspect = app.add_subcommand("inspect", "Print mesh/asset statistics as JSON");
    std::string inspect_path;
    inspect->add_option("path", inspect_path, "GLB or OBJ file")->required();

    CLI::App* validate = app.add_subcommand("validate", "Validate a mesh and print the report as JSON");
    std::string validate_path;
    validate->add_option("path", validate_path, "GLB or OBJ file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (generate->parsed()) {
            json replay_config;
            const json* base = nullptr;
            if (!replay_path.empty()) {
                const json prov = read_json_file(replay_path);
                if (!prov.contains("config") || !prov.contains("prompt")) {
                    throw InputError(replay_path + ": not a provenance record");
                }
                replay_config = prov["config"];
                base = &replay_config;
                if (gen_prompt.empty()) {
                    gen_prompt = prov["prompt"].get<std::string>();
                }
            }
            const PipelineConfig config = gen_opts.build(base);
            const Prompt prompt = make_prompt(gen_prompt, config);
            Pipeline pipeline(config);
            Asset asset = pipeline.stage1_generate(prompt);
            if (!stage1_only) {
                asset = pipeline.stage2_refine(asset, prompt);
            }
            pipeline.write(asset);
            report_stages(asset, err);
            err << "wrote " << (std::filesystem::path(config.output_dir) / "asset.glb").string() << '\n';
            return 0;
        }
        if (retexture->parsed()) {
            const PipelineConfig config = re_opts.build();
            const Prompt prompt = make_prompt(re_prompt, config);
            const Mesh mesh = load_mesh_any(re_mesh);
            Pipeline pipeline(config);
            const Asset asset = pipeline.retexture(mesh, prompt);
            pipeline.write(asset);
            report_stages(asset, err);
            return 0;
        }
        if (bake->parsed()) {
            return run_bake(bake_mesh, bake_views, bake_opts, err);
        }
        if (inspect->parsed()) {
            return run_inspect(inspect_path, out);
        }
        if (validate->parsed()) {
            return run_validate(validate_path, out);
        }
    } catch (const StageError& e) {
        err << "error: " << e.what() << '\n';
        return e.is_input_error() ? 1 : 2;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace gen3d

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gen3d/error.hpp"
#include "gen3d/gltf.hpp"
#include "gen3d/pipeline.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace gen3d;
using nlohmann::json;

namespace {

std::vector<std::string> stage_names(const Provenance& p, const std::string& pipeline) {
    std::vector<std::string> out;
    for (const auto& s : p.stages) {
        if (s.pipeline == pipeline) {
            out.push_back(s.stage);
        }
    }
    return out;
}

// Smaller but otherwise default run for the tests that only need the plumbing.
PipelineConfig small_config() {
    PipelineConfig c;
    c.views.resolution = 256;
    c.sdf.resolution = 48;
    c.texture.resolution = 512;
    return c;
}

std::array<double, 3> albedo_mean(const Texture& t) {
    std::array<double, 3> sum{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.texel_count(); ++i) {
        if (t.coverage[i] == 0) {
            continue;
        }
        ++n;
        for (int c = 0; c < 3; ++c) {
            sum[c] += t.pixels[i * t.channels + c];
        }
    }
    for (double& s : sum) {
        s /= static_cast<double>(n);
    }
    return sum;
}

Mesh artist_cube() { return load_obj_file((oracle::data_dir() / "cube_artist_uv.obj").string()); }

const std::vector<std::string> kStage1 = {"generate_views", "fuse_views_to_sdf", "marching_cubes", "generate_atlas",
                                          "bake_views",     "fuse_partials",     "fill_holes",     "fix_seams"};
const std::vector<std::string> kStage2 = {"render_conditioning", "generate_views", "bake_views",
                                          "fuse_partials",       "fill_holes",     "fix_seams"};

}  // namespace

TEST(Pipeline, BlueSphereAtDefaults) {
    const PipelineConfig config;
    Pipeline pipeline(config);
    const Asset asset = pipeline.stage1_generate(make_prompt("sphere, solid blue, matte", config));
    EXPECT_EQ(stage_names(asset.provenance, "stage1"), kStage1);

    const double cell = SDFGrid::unit_cube(config.sdf.resolution, config.sdf.truncation_cells).cell;
    ASSERT_GT(asset.mesh.vertices.size(), 1000u);
    for (const Vec3& v : asset.mesh.vertices) {
        ASSERT_LT(std::abs(length(v) - 0.4), 1.5 * cell);
    }

    const Texture& t = asset.texture;
    std::size_t covered = 0, blue = 0;
    for (std::size_t i = 0; i < t.texel_count(); ++i) {
        if (t.coverage[i] == 0) {
            continue;
        }
        ++covered;
        const float* p = t.texel(i);
        blue += (std::abs(p[0]) < 1.0 / 255 && std::abs(p[1]) < 1.0 / 255 && std::abs(p[2] - 1.0) < 1.0 / 255) ? 1 : 0;
    }
    ASSERT_GT(covered, 10000u);
    EXPECT_GE(static_cast<double>(blue) / covered, 0.99);
    EXPECT_NEAR(asset.materials.roughness[0], 0.9, 1e-6);
}

TEST(Pipeline, EmptyPromptIsAPreconditionError) {
    Pipeline pipeline(small_config());
    Prompt p;
    EXPECT_THROW(pipeline.stage1_generate(p), InputError);
    EXPECT_THROW(make_prompt("", small_config()), InputError);
}

TEST(Pipeline, Stage2KeepsGeometryAndRunsItsSequence) {
    PipelineConfig config = small_config();
    Pipeline pipeline(config);
    const Prompt prompt = make_prompt("red striped sphere", config);
    const Asset s1 = pipeline.stage1_generate(prompt);
    const Asset s2 = pipeline.stage2_refine(s1, prompt);
    EXPECT_EQ(mesh_hash(s1.mesh), mesh_hash(s2.mesh));
    EXPECT_EQ(s1.mesh.vertices, s2.mesh.vertices);
    EXPECT_EQ(s1.mesh.uv, s2.mesh.uv);
    EXPECT_EQ(stage_names(s2.provenance, "stage1"), kStage1);
    EXPECT_EQ(stage_names(s2.provenance, "stage2"), kStage2);

    // Same prompt: the conditioned pass sees the true surface, so nothing gets worse.
    EXPECT_LE(s2.metrics.seam_after, s1.metrics.seam_after + 1e-9);
    EXPECT_GE(s2.metrics.observed_fraction, s1.metrics.observed_fraction);
    EXPECT_GE(s2.metrics.uv_coverage, s1.metrics.uv_coverage);
}

TEST(Pipeline, UpscaleIsTheLastStage2Stage) {
    PipelineConfig config = small_config();
    config.texture.resolution = 256;
    config.upscale_factor = 2;
    Pipeline pipeline(config);
    const Asset a = pipeline.retexture(artist_cube(), make_prompt("solid green", config));
    auto names = stage_names(a.provenance, "retexture");
    ASSERT_FALSE(names.empty());
    EXPECT_EQ(names.back(), "upscale");
    EXPECT_EQ(a.texture.size, 512);
    EXPECT_EQ(a.materials.size, 512);
}

TEST(Pipeline, RefiningACheckerCubeMatchesDirectEvaluation) {
    PipelineConfig config = small_config();
    config.views.resolution = 512;
    config.texture.resolution = 1024;
    Pipeline pipeline(config);
    Asset cube;
    cube.mesh = generate_atlas(primitives::box({0, 0, 0}, {0.35, 0.35, 0.35})).mesh;
    const Prompt prompt = make_prompt("checker, black and white", config);
    const Asset out = pipeline.stage2_refine(cube, prompt);
    const auto e = fixture::round_trip_error(out.texture, fixture::procedural_reference(cube.mesh, prompt, 1024));
    ASSERT_GT(e.texels, 100000u);
    EXPECT_LT(e.mean, 4.0 / 255);
}

TEST(Pipeline, RetextureHonorsArtistUvs) {
    PipelineConfig config = small_config();
    Pipeline pipeline(config);
    const Mesh cube = artist_cube();
    ASSERT_TRUE(cube.has_uv());
    const Asset a = pipeline.retexture(cube, make_prompt("solid red", config));
    EXPECT_EQ(a.mesh.uv, cube.uv);
    EXPECT_EQ(a.mesh.faces, cube.faces);
    EXPECT_EQ(stage_names(a.provenance, "retexture"), kStage2);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < a.texture.texel_count(); ++i) {
        if (a.texture.coverage[i] == 0) {
            continue;
        }
        ++covered;
        const float* p = a.texture.texel(i);
        ASSERT_NEAR(p[0], 1.0, 1e-6);
        ASSERT_NEAR(p[1], 0.0, 1e-6);
        ASSERT_NEAR(p[2], 0.0, 1e-6);
    }
    EXPECT_GT(covered, 1000u);
}

TEST(Pipeline, RetextureWithoutUvsGeneratesAnAtlas) {
    PipelineConfig config = small_config();
    Pipeline pipeline(config);
    Mesh bare = primitives::icosphere({0, 0, 0}, 0.4, 3);
    bare.uv.clear();
    ASSERT_FALSE(bare.has_uv());
    const Asset a = pipeline.retexture(bare, make_prompt("marble gray", config));
    EXPECT_TRUE(a.mesh.has_uv());
    auto names = stage_names(a.provenance, "retexture");
    ASSERT_FALSE(names.empty());
    EXPECT_EQ(names.front(), "generate_atlas");
    EXPECT_EQ(std::vector<std::string>(names.begin() + 1, names.end()), kStage2);
    EXPECT_GT(a.metrics.uv_coverage, 0.3);
}

TEST(Pipeline, TwoPromptsSameGeometryDifferentTextures) {
    PipelineConfig config = small_config();
    Pipeline pipeline(config);
    const Mesh cube = artist_cube();
    const Asset a = pipeline.retexture(cube, make_prompt("solid yellow", config));
    const Asset b = pipeline.retexture(cube, make_prompt("solid blue", config));
    EXPECT_EQ(mesh_hash(a.mesh), mesh_hash(b.mesh));
    const auto ma = albedo_mean(a.texture);
    const auto mb = albedo_mean(b.texture);
    const double d = std::abs(ma[0] - mb[0]) + std::abs(ma[1] - mb[1]) + std::abs(ma[2] - mb[2]);
    EXPECT_GT(d / 3.0, 0.1);
}

TEST(Pipeline, DeterministicOutputBytes) {
    oracle::TempDir dir_a("pipe_a"), dir_b("pipe_b");
    std::vector<std::vector<std::uint8_t>> glbs;
    std::vector<json> provs;
    for (const oracle::TempDir* dir : {&dir_a, &dir_b}) {
        PipelineConfig config = small_config();
        config.output_dir = dir->path().string();
        Pipeline pipeline(config);
        const Prompt prompt = make_prompt("checker cube, red and white", config);
        const Asset a = pipeline.stage2_refine(pipeline.stage1_generate(prompt), prompt);
        pipeline.write(a);
        glbs.push_back(oracle::slurp(*dir / "asset.glb"));
        json p = json::parse(oracle::slurp(*dir / "provenance.json"));
        ASSERT_TRUE(p.contains("run"));
        p.erase("run");
        provs.push_back(p);
    }
    EXPECT_EQ(glbs[0], glbs[1]);
    EXPECT_EQ(provs[0], provs[1]);
    EXPECT_EQ(provs[0]["prompt"], "checker cube, red and white");
    EXPECT_EQ(provs[0]["backend"]["used"], "procedural");
    EXPECT_FALSE(provs[0]["config"].contains("output_dir"));

    // The GLB loads back with the same geometry.
    const GltfAsset loaded = load_glb(glbs[0]);
    EXPECT_GT(loaded.mesh.faces.size(), 100u);
    ASSERT_TRUE(loaded.materials.has_value());
    EXPECT_EQ(loaded.materials->size, 512);
}

TEST(Pipeline, SeedOverrideChangesProvenanceOnly) {
    PipelineConfig config = small_config();
    config.seed = 42;
    EXPECT_EQ(make_prompt("anything", config).seed, 42u);
    config.seed.reset();
    EXPECT_EQ(make_prompt("anything", config).seed, fnv1a64(std::string_view("anything")));
}

TEST(Pipeline, RemoteFailureFallsBackToProcedural) {
    PipelineConfig config = small_config();
    config.backend.kind = "remote";
    config.backend.endpoint = "http://127.0.0.1:1";
    config.backend.retries = 0;
    config.backend.timeout_s = 2.0;
    Pipeline pipeline(config);
    const Asset a = pipeline.retexture(artist_cube(), make_prompt("solid red", config));
    EXPECT_EQ(a.provenance.backend_requested, "remote");
    EXPECT_EQ(a.provenance.backend_used, "procedural");
    ASSERT_EQ(a.provenance.warnings.size(), 1u);
    EXPECT_NE(a.provenance.warnings[0].find("falling back"), std::string::npos);
    const auto mean = albedo_mean(a.texture);
    EXPECT_NEAR(mean[0], 1.0, 1e-6);
    EXPECT_NEAR(mean[1], 0.0, 1e-6);
}

TEST(Pipeline, RemoteWithoutEndpointIsAnInputError) {
    PipelineConfig config = small_config();
    config.backend.kind = "remote";
    ::unsetenv("GEN3D_ENDPOINT");
    EXPECT_THROW(make_backend(config), InputError);
    config.backend.kind = "replay";
    EXPECT_THROW(make_backend(config), InputError);
}

TEST(Pipeline, ModuleErrorsCarryTheStageName) {
    PipelineConfig config = small_config();
    Pipeline pipeline(config);
    Mesh bad = artist_cube();
    bad.uv[0] = {1.5, 0.2};
    EXPECT_THROW(pipeline.retexture(bad, make_prompt("solid red", config)), InputError);
    Asset no_uv;
    no_uv.mesh = primitives::icosphere({0, 0, 0}, 0.4, 2);
    no_uv.mesh.uv.clear();
    EXPECT_THROW(pipeline.stage2_refine(no_uv, make_prompt("x", config)), InputError);

    // No corner is trusted, so marching cubes finds nothing.
    config.sdf.min_weight = 1e6;
    Pipeline strict(config);
    try {
        strict.stage1_generate(make_prompt("cube", config));
        ADD_FAILURE() << "expected a failure";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "marching_cubes");
        EXPECT_TRUE(e.is_input_error());
        EXPECT_EQ(std::string(e.what()).rfind("marching_cubes: ", 0), 0u);
    }
}

TEST(PipelineConfig, JsonRoundTripIsExact) {
    PipelineConfig c;
    c.views.count = 6;
    c.views.elevation_pattern = "ring";
    c.sdf.truncation_cells = 2.5;
    c.texture.depth_tolerance = 0.0025;
    c.seams.relaxation = 0.3;
    c.backend.jitter = 0.05;
    c.seed = 123456789012345ull;
    c.light.direction = normalize(Vec3{0.3, 0.7, 0.2});
    c.debug = true;
    const PipelineConfig back = PipelineConfig::from_json(c.to_json());
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.to_json().dump(), c.to_json().dump());
    EXPECT_EQ(back.hash(), c.hash());
    EXPECT_EQ(back.seed, c.seed);

    // A partial document keeps the defaults for everything it leaves out.
    const PipelineConfig partial = PipelineConfig::from_json(json{{"texture", {{"resolution", 256}}}});
    PipelineConfig expect;
    expect.texture.resolution = 256;
    EXPECT_EQ(partial, expect);
}

TEST(PipelineConfig, HashIgnoresOutputDir) {
    PipelineConfig a, b;
    b.output_dir = "somewhere/else";
    EXPECT_EQ(a.hash(), b.hash());
    b.texture.resolution = 512;
    EXPECT_NE(a.hash(), b.hash());
}

TEST(PipelineConfig, RejectsUnknownKeysAndWrongTypes) {
    EXPECT_THROW(PipelineConfig::from_json(json{{"bogus", 1}}), InputError);
    EXPECT_THROW(PipelineConfig::from_json(json{{"texture", {{"resolutoin", 256}}}}), InputError);
    EXPECT_THROW(PipelineConfig::from_json(json{{"texture", {{"resolution", "big"}}}}), InputError);
    EXPECT_THROW(PipelineConfig::from_json(json{{"views", 4}}), InputError);
}

TEST(PipelineConfig, ValidationRanges) {
    auto bad = [](auto mutate) {
        PipelineConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), InputError);
    };
    bad([](PipelineConfig& c) { c.views.count = 0; });
    bad([](PipelineConfig& c) { c.views.elevation_pattern = "spiral"; });
    bad([](PipelineConfig& c) { c.sdf.resolution = 2; });
    bad([](PipelineConfig& c) { c.texture.resolution = 1000; });
    bad([](PipelineConfig& c) { c.texture.confidence_floor = 1.5; });
    bad([](PipelineConfig& c) { c.seams.relaxation = -0.1; });
    bad([](PipelineConfig& c) { c.upscale_factor = 3; });
    bad([](PipelineConfig& c) { c.upscale_factor = 8; });
    bad([](PipelineConfig& c) { c.backend.kind = "dreamfusion"; });
    bad([](PipelineConfig& c) { c.backend.jitter = 2.0; });
    bad([](PipelineConfig& c) { c.light.direction = {0, 2, 0}; });
    bad([](PipelineConfig& c) { c.output_dir.clear(); });
    EXPECT_NO_THROW(PipelineConfig{}.validate());
    EXPECT_THROW(Pipeline([] {
                     PipelineConfig c;
                     c.atlas.padding = -1;
                     return c;
                 }()),
                 InputError);
}

TEST(PipelineConfig, DottedOverrides) {
    PipelineConfig c;
    c.apply_override("texture.resolution", "256");
    c.apply_override("views.elevation_pattern", "ring");
    c.apply_override("backend.endpoint", "http://localhost:9000");
    c.apply_override("debug", "true");
    c.apply_override("seed", "17");
    c.apply_override("light.direction", "[0, 1, 0]");
    EXPECT_EQ(c.texture.resolution, 256);
    EXPECT_EQ(c.views.elevation_pattern, "ring");
    EXPECT_EQ(c.backend.endpoint, "http://localhost:9000");
    EXPECT_TRUE(c.debug);
    EXPECT_EQ(c.seed, 17u);
    EXPECT_EQ(c.light.direction, (Vec3{0, 1, 0}));

    EXPECT_THROW(c.apply_override("texture.nope", "1"), InputError);
    EXPECT_THROW(c.apply_override("texture", "1"), InputError);
    EXPECT_THROW(c.apply_override("texture.resolution", "abc"), InputError);
    EXPECT_THROW(c.apply_override("texture.resolution", "1000"), InputError);
    EXPECT_EQ(c.texture.resolution, 256);  // failed overrides leave the config alone
}

TEST(PipelineConfig, EveryLeafIsOverridable) {
    // Walk the JSON document and override each leaf with its own value.
    const json doc = PipelineConfig{}.to_json();
    std::vector<std::pair<std::string, json>> leaves;
    std::function<void(const json&, const std::string&)> walk = [&](const json& j, const std::string& prefix) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
            if (it->is_object()) {
                walk(*it, key);
            } else {
                leaves.emplace_back(key, *it);
            }
        }
    };
    walk(doc, "");
    EXPECT_GT(leaves.size(), 30u);
    for (const auto& [key, value] : leaves) {
        PipelineConfig c;
        const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
        if (value.is_null()) {
            continue;  // the optional seed
        }
        EXPECT_NO_THROW(c.apply_override(key, text)) << key;
        EXPECT_EQ(c, PipelineConfig{}) << key;
    }
}

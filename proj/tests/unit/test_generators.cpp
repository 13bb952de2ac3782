#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "gen3d/error.hpp"
#include "gen3d/generators.hpp"
#include "gen3d/image.hpp"
#include "gen3d/primitives.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace gen3d;

namespace {

const KeywordEntry& entry(const char* word) {
    for (const auto& e : keyword_table()) {
        if (std::strcmp(e.word, word) == 0) {
            return e;
        }
    }
    throw std::runtime_error(std::string("no keyword ") + word);
}

bool same_image(const Image& a, const Image& b) {
    return a.width == b.width && a.height == b.height && a.channels == b.channels &&
           std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0;
}

}  // namespace

TEST(Prompt, SeedFromTextHashAndOverride) {
    const Prompt p = Prompt::make("red striped sphere");
    EXPECT_EQ(p.seed, fnv1a64(std::string_view("red striped sphere")));
    EXPECT_EQ(Prompt::make("red striped sphere", 7).seed, 7u);
    EXPECT_THROW(Prompt::make(""), InputError);
    EXPECT_THROW(Prompt::make("  \t"), InputError);
}

TEST(Keywords, SolidBlueMatte) {
    const auto v = procedural_texture(Prompt::make("solid blue, matte"), {0.1, -0.2, 0.3}, {0, 1, 0});
    EXPECT_EQ(v[0], 0.0);
    EXPECT_EQ(v[1], 0.0);
    EXPECT_EQ(v[2], 1.0);
    EXPECT_EQ(v[3], entry("matte").roughness);
    EXPECT_EQ(v[3], 0.9);
    EXPECT_EQ(v[4], 0.0);
}

TEST(Keywords, MetalAndDefaults) {
    EXPECT_EQ(procedural_texture(Prompt::make("metal"), {0, 0, 0}, {0, 0, 1})[4], 1.0);
    const PromptStyle plain = parse_prompt(Prompt::make("red"));
    EXPECT_EQ(plain.roughness, 0.8);
    EXPECT_EQ(plain.metalness, 0.0);
    EXPECT_EQ(plain.pattern, Pattern::solid);
    EXPECT_FALSE(plain.palette_from_hash);
}

TEST(Keywords, TokenizationAndShapes) {
    const PromptStyle s = parse_prompt(Prompt::make("A GLOSSY, Checkered cube+torus!"));
    EXPECT_EQ(s.pattern, Pattern::checker);
    EXPECT_EQ(s.roughness, entry("glossy").roughness);
    ASSERT_EQ(s.shapes.size(), 2u);
    EXPECT_EQ(s.shapes[0], Shape::cube);
    EXPECT_EQ(s.shapes[1], Shape::torus);
}

TEST(Keywords, UnknownPromptHashesToPalette) {
    const PromptStyle a = parse_prompt(Prompt::make("zorblax quux"));
    EXPECT_TRUE(a.palette_from_hash);
    const PromptStyle b = parse_prompt(Prompt::make("zorblax quux", 1234));
    EXPECT_EQ(a.color_a, b.color_a);  // the seed never changes what the text means
    const PromptStyle c = parse_prompt(Prompt::make("flimflam"));
    EXPECT_NE(a.color_a, c.color_a);
    for (double x : {a.color_a.x, a.color_a.y, a.color_a.z}) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
    }
}

TEST(ProceduralTexture, PeriodicUnderPatternPeriods) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (const char* text : {"stripes red and white", "checker black and white", "marble gray", "solid green"}) {
        SCOPED_TRACE(text);
        const Prompt p = Prompt::make(text);
        const auto periods = pattern_period(p);
        ASSERT_EQ(periods.size(), 3u);
        for (int t = 0; t < 200; ++t) {
            const Vec3 a{u(rng), u(rng), u(rng)};
            const Vec3 b = a + periods[t % 3] * static_cast<double>(1 + t % 2);
            const auto va = procedural_texture(p, a, {0, 1, 0});
            const auto vb = procedural_texture(p, b, {0, 1, 0});
            for (int c = 0; c < 5; ++c) {
                ASSERT_NEAR(va[c], vb[c], 1e-9);
            }
        }
    }
}

TEST(ProceduralTexture, StripesAreHorizontalBands) {
    const Prompt p = Prompt::make("red striped sphere");
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    bool saw_red = false, saw_other = false;
    for (int t = 0; t < 300; ++t) {
        const double y = u(rng);
        const auto a = procedural_texture(p, {u(rng), y, u(rng)}, {0, 1, 0});
        const auto b = procedural_texture(p, {u(rng), y, u(rng)}, {1, 0, 0});
        for (int c = 0; c < 5; ++c) {
            ASSERT_EQ(a[c], b[c]);
        }
        saw_red |= a[0] == 1.0 && a[1] == 0.0;
        saw_other |= a[1] > 0.5;
    }
    EXPECT_TRUE(saw_red);
    EXPECT_TRUE(saw_other);
}

TEST(PromptGeometry, DefaultsAndLayout) {
    const Mesh sphere = prompt_geometry(Prompt::make("something blue"));
    for (const auto& v : sphere.vertices) {
        ASSERT_NEAR(length(v), 0.4, 1e-9);
    }
    const Mesh pair = prompt_geometry(Prompt::make("cube and torus"));
    const Bounds b = bounding_box(pair);
    EXPECT_GE(b.min.x, -0.5 - 1e-9);
    EXPECT_LE(b.max.x, 0.5 + 1e-9);
    EXPECT_LT(b.min.x, -0.2);
    EXPECT_GT(b.max.x, 0.2);
}

TEST(ProceduralBackend, UnconditionedSphereDepthMatchesAnalyticSphere) {
    const auto cams = canonical_cameras(4, 20, 2.2, 256);
    ProceduralBackend backend;
    const GeneratedViewSet set = backend.generate(Prompt::make("sphere"), cams, nullptr);
    EXPECT_FALSE(set.conditioned);
    check_view_set(set, cams);
    for (std::size_t k = 0; k < cams.size(); ++k) {
        const Camera& cam = cams[k];
        const RenderedView& v = set.views[k];
        std::size_t both = 0;
        for (int y = 0; y < v.resolution; ++y) {
            for (int x = 0; x < v.resolution; ++x) {
                const Vec3 d = cam.ray_direction({x + 0.5, y + 0.5});
                // Ray/sphere intersection, r = 0.4 at the origin.
                const double bq = dot(cam.position, d);
                const double disc = bq * bq - (dot(cam.position, cam.position) - 0.16);
                if (disc < 0.0) {
                    continue;
                }
                const double t = -bq - std::sqrt(disc);
                const double z = t * dot(d, cam.forward());
                // Facets of the tessellated sphere bias grazing rays, so stay where |n·v| > 0.3.
                if (std::sqrt(disc) > 0.3 * 0.4 && v.covered(x, y)) {
                    ++both;
                    ASSERT_NEAR(v.depth.at(x, y, 0), z, 1e-3) << x << "," << y;
                }
            }
        }
        EXPECT_GT(both, 5000u);
    }
}

TEST(ProceduralBackend, ConditionedIsDeterministicAndKeepsGeometry) {
    const Mesh sphere = primitives::icosphere({0, 0, 0}, 0.4, 4);
    const auto cams = canonical_cameras(3, 20, 2.2, 128);
    const GeometryConditioning cond = render_conditioning(sphere, cams);
    ASSERT_EQ(cond.buffers.size(), cams.size());
    ProceduralBackend backend;
    const Prompt p = Prompt::make("red striped sphere");
    const auto a = backend.generate(p, cams, &cond);
    const auto b = backend.generate(p, cams, &cond);
    EXPECT_TRUE(a.conditioned);
    check_view_set(a, cams);
    for (std::size_t k = 0; k < cams.size(); ++k) {
        EXPECT_TRUE(same_image(a.views[k].albedo, b.views[k].albedo));
        EXPECT_TRUE(same_image(a.views[k].shaded, b.views[k].shaded));
        EXPECT_TRUE(same_image(a.views[k].depth, cond.buffers[k].depth));
        EXPECT_TRUE(same_image(a.views[k].normal, cond.buffers[k].normal));
        EXPECT_EQ(a.views[k].mask, cond.buffers[k].mask);
    }
}

TEST(ProceduralBackend, ViewsAreConsistentAcrossCameras) {
    const Mesh mesh = generate_atlas(primitives::icosphere({0, 0, 0}, 0.4, 4)).mesh;
    const auto cams = fixture::four_view_rig();
    const auto cond = render_conditioning(mesh, cams);
    ProceduralBackend backend;
    const auto views = backend.generate(Prompt::make("checker, black and white"), cams, &cond);
    std::vector<PartialTexture> parts;
    for (std::size_t k = 0; k < cams.size(); ++k) {
        parts.push_back(bake_view_to_partial(mesh, views.views[k], cams[k], 512, static_cast<int>(k)));
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t a = 0; a < parts.size(); ++a) {
        for (std::size_t b = a + 1; b < parts.size(); ++b) {
            for (std::size_t i = 0; i < parts[a].confidence.size(); ++i) {
                if (parts[a].confidence[i] < 0.1f || parts[b].confidence[i] < 0.1f) {
                    continue;
                }
                for (int c = 0; c < 5; ++c) {
                    sum += std::abs(parts[a].pixels[i * 5 + c] - parts[b].pixels[i * 5 + c]);
                    ++n;
                }
            }
        }
    }
    ASSERT_GT(n, 1000u);
    EXPECT_LT(sum / n, 4.0 / 255);
}

TEST(ProceduralBackend, JitterOffsetsAndMonotoneError) {
    for (std::size_t k = 0; k < 16; ++k) {
        const Vec3 j = ProceduralBackend::jitter_direction(99, k);
        for (double c : {j.x, j.y, j.z}) {
            ASSERT_GE(c, -1.0);
            ASSERT_LE(c, 1.0);
        }
        EXPECT_EQ(j, ProceduralBackend::jitter_direction(99, k));
    }
    EXPECT_NE(ProceduralBackend::jitter_direction(99, 0), ProceduralBackend::jitter_direction(99, 1));

    const Mesh mesh = generate_atlas(primitives::icosphere({0, 0, 0}, 0.4, 4)).mesh;
    const Prompt p = Prompt::make("stripes, gray and white");
    double previous = -1.0;
    for (double sigma : {0.0, 0.05, 0.1}) {
        const auto e = fixture::jittered_round_trip(mesh, p, sigma, 512);
        EXPECT_GT(e.mean, previous) << sigma;
        previous = e.mean;
    }
}

TEST(ProceduralBackend, Errors) {
    ProceduralBackend backend;
    EXPECT_THROW(backend.generate(Prompt::make("x"), {}, nullptr), InputError);
    const auto cams = canonical_cameras(3, 20, 2.2, 32);
    const auto cond = render_conditioning(primitives::box({0, 0, 0}, {0.3, 0.3, 0.3}), std::span(cams).first(2));
    EXPECT_THROW(backend.generate(Prompt::make("x"), cams, &cond), InputError);
    GeneratedViewSet bad = backend.generate(Prompt::make("x"), cams, nullptr);
    bad.views.pop_back();
    EXPECT_THROW(check_view_set(bad, cams), InputError);
    bad = backend.generate(Prompt::make("x"), cams, nullptr);
    bad.views[1].albedo = Image(16, 16, 3);
    EXPECT_THROW(check_view_set(bad, cams), InputError);
}

#include <gtest/gtest.h>

#include <random>

#include "gen3d/error.hpp"
#include "gen3d/mesh.hpp"
#include "gen3d/primitives.hpp"
#include "oracles.hpp"

using namespace gen3d;

namespace {

Mesh load_fixture(const std::string& name) { return load_obj_file((oracle::data_dir() / name).string()); }

}  // namespace

TEST(LoadObj, CubeCounts) {
    const Mesh m = load_fixture("cube.obj");
    EXPECT_EQ(m.vertices.size(), 8u);
    EXPECT_EQ(m.faces.size(), 12u);
    EXPECT_FALSE(m.has_uv());
    EXPECT_EQ(m.normals.size(), 8u);
    EXPECT_GT(oracle::signed_volume(m), 0.0);
}

TEST(LoadObj, IcosphereLevel3Counts) {
    const Mesh m = load_fixture("icosphere3.obj");
    EXPECT_EQ(m.vertices.size(), 642u);
    EXPECT_EQ(m.faces.size(), 1280u);
    EXPECT_EQ(oracle::euler_characteristic(m), 2);
}

TEST(LoadObj, ZeroIndexNamesTheLine) {
    const std::string text = "v 0 0 0\nv 1 0 0\nv 0 1 0\n# comment\nf 0 1 2\n";
    try {
        load_obj(text);
        FAIL() << "expected a parse error";
    } catch (const ObjParseError& e) {
        EXPECT_EQ(e.line(), 5u);
        EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
    }
}

TEST(LoadObj, IndexPastEndIsRejected) {
    EXPECT_THROW(load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), ObjParseError);
}

TEST(LoadObj, MalformedNumberIsRejected) {
    try {
        load_obj("v 0 0 0\nv 1 zero 0\n");
        FAIL();
    } catch (const ObjParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(LoadObj, EmptyMeshIsRejected) {
    EXPECT_THROW(load_obj("v 0 0 0\nv 1 0 0\n"), InputError);
    EXPECT_THROW(load_obj(""), InputError);
}

TEST(LoadObj, NegativeIndicesAreRelative) {
    const Mesh m = load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    ASSERT_EQ(m.faces.size(), 1u);
    EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
}

TEST(LoadObj, QuadSplitsAlongFirstDiagonal) {
    const Mesh m = load_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    ASSERT_EQ(m.faces.size(), 2u);
    EXPECT_EQ(m.faces[0], (Face{0, 1, 2}));
    EXPECT_EQ(m.faces[1], (Face{0, 2, 3}));
}

TEST(LoadObj, QuadCubeMatchesTriangleCube) {
    const Mesh quads = load_fixture("cube_quads.obj");
    EXPECT_EQ(quads.faces.size(), 12u);
    EXPECT_EQ(quads.vertices.size(), 8u);
    EXPECT_NEAR(oracle::signed_volume(quads), 1.0, 1e-9);
}

TEST(LoadObj, PerCornerUvsSplitVertices) {
    const Mesh m = load_fixture("cube_artist_uv.obj");
    // 6 sides × 4 corners, each (position, uv) pair distinct.
    EXPECT_EQ(m.vertices.size(), 24u);
    ASSERT_EQ(m.uv.size(), 24u);
    // OBJ v grows upwards, stored v grows downwards.
    const Mesh raw = load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0.25 0.1\nvt 1 0\nvt 0 1\nf 1/1 2/2 3/3\n");
    EXPECT_DOUBLE_EQ(raw.uv[0].x, 0.25);
    EXPECT_DOUBLE_EQ(raw.uv[0].y, 0.9);
}

TEST(LoadObj, MixedUvCornersAreRejected) {
    EXPECT_THROW(load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1 2 3\n"), ObjParseError);
}

TEST(Normalization, UnitExtentCentered) {
    const Mesh m = load_obj("v 10 2 3\nv 14 2 3\nv 10 4 3\nv 10 2 5\nf 1 2 3\nf 1 2 4\n");
    const Bounds b = bounding_box(m);
    const double ext = std::max({b.max.x - b.min.x, b.max.y - b.min.y, b.max.z - b.min.z});
    EXPECT_NEAR(ext, 1.0, 1e-12);
    EXPECT_NEAR(b.min.x + b.max.x, 0.0, 1e-6);
    EXPECT_NEAR(b.min.y + b.max.y, 0.0, 1e-6);
    EXPECT_NEAR(b.min.z + b.max.z, 0.0, 1e-6);
}

TEST(Normals, UnitLengthAndFlipWithWinding) {
    Mesh m = load_fixture("icosphere3.obj");
    const auto n = compute_vertex_normals(m);
    for (const auto& v : n) {
        EXPECT_NEAR(length(v), 1.0, 1e-6);
    }
    Mesh flipped = m;
    for (auto& f : flipped.faces) {
        std::swap(f[1], f[2]);
    }
    const auto nf = compute_vertex_normals(flipped);
    for (std::size_t i = 0; i < n.size(); ++i) {
        EXPECT_NEAR(nf[i].x, -n[i].x, 1e-12);
        EXPECT_NEAR(nf[i].y, -n[i].y, 1e-12);
        EXPECT_NEAR(nf[i].z, -n[i].z, 1e-12);
    }
    // On a sphere the outward normal is the normalized position.
    for (std::size_t i = 0; i < n.size(); ++i) {
        EXPECT_GT(dot(n[i], normalize(m.vertices[i])), 0.99);
    }
}

TEST(ObjRoundTrip, PositionsAndTopologyPreserved) {
    for (const char* name : {"cube.obj", "icosphere3.obj", "cube_artist_uv.obj"}) {
        const Mesh a = load_fixture(name);
        const Mesh b = load_obj(save_obj(a));
        ASSERT_EQ(a.vertices.size(), b.vertices.size()) << name;
        ASSERT_EQ(a.faces, b.faces) << name;
        for (std::size_t i = 0; i < a.vertices.size(); ++i) {
            EXPECT_NEAR(a.vertices[i].x, b.vertices[i].x, 1e-5);
            EXPECT_NEAR(a.vertices[i].y, b.vertices[i].y, 1e-5);
            EXPECT_NEAR(a.vertices[i].z, b.vertices[i].z, 1e-5);
        }
        ASSERT_EQ(a.uv.size(), b.uv.size());
        for (std::size_t i = 0; i < a.uv.size(); ++i) {
            EXPECT_NEAR(a.uv[i].x, b.uv[i].x, 1e-6);
            EXPECT_NEAR(a.uv[i].y, b.uv[i].y, 1e-6);
        }
    }
}

TEST(Validate, CubePasses) {
    const auto r = validate_mesh(load_fixture("cube.obj"));
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.out_of_range_indices, 0u);
    EXPECT_EQ(r.degenerate_faces, 0u);
    EXPECT_EQ(r.non_manifold_edges, 0u);
}

TEST(Validate, OutOfRangeIndex) {
    Mesh m = load_fixture("cube.obj");
    m.faces[3][1] = static_cast<std::uint32_t>(m.vertices.size());
    const Mesh before = m;
    const auto r = validate_mesh(m);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.out_of_range_indices, 1u);
    EXPECT_EQ(m, before);
}

TEST(Validate, DuplicatedFaceMakesThreeNonManifoldEdges) {
    Mesh m = load_fixture("cube.obj");
    m.faces.push_back(m.faces[0]);
    const auto r = validate_mesh(m);
    std::size_t expected = 0;
    for (const auto& [edge, count] : oracle::edge_incidence(m)) {
        expected += count > 2 ? 1 : 0;
    }
    EXPECT_EQ(expected, 3u);
    EXPECT_EQ(r.non_manifold_edges, expected);
    EXPECT_TRUE(r.pass);  // warning only
}

TEST(Validate, DegenerateFaceAndBadUv) {
    Mesh m = load_fixture("cube.obj");
    m.faces.push_back({0, 0, 1});
    m.uv.assign(m.vertices.size(), Vec2{0.5, 0.5});
    m.uv[2] = {1.5, 0.0};
    const auto r = validate_mesh(m);
    EXPECT_EQ(r.degenerate_faces, 1u);
    EXPECT_EQ(r.out_of_range_uvs, 1u);
    EXPECT_FALSE(r.pass);
}

TEST(Primitives, ClosedAndOutward) {
    struct Case {
        const char* name;
        Mesh mesh;
        long chi;
    };
    const std::vector<Case> cases = {
        {"box", primitives::box({0, 0, 0}, {0.5, 0.5, 0.5}), 2},
        {"subdivided_box", primitives::subdivided_box({0, 0, 0}, {0.3, 0.3, 0.3}, 5), 2},
        {"icosphere", primitives::icosphere({0, 0, 0}, 0.4, 3), 2},
        {"torus", primitives::torus({0, 0, 0}, 0.3, 0.1, 32, 16), 0},
        {"capsule", primitives::capsule({0, 0, 0}, 0.2, 0.2, 24, 12), 2},
    };
    for (const auto& c : cases) {
        EXPECT_EQ(oracle::euler_characteristic(c.mesh), c.chi) << c.name;
        EXPECT_GT(oracle::signed_volume(c.mesh), 0.0) << c.name;
        for (const auto& [edge, count] : oracle::edge_incidence(c.mesh)) {
            ASSERT_EQ(count, 2) << c.name;
        }
        EXPECT_TRUE(validate_mesh(c.mesh).pass) << c.name;
    }
    const Mesh ico = primitives::icosphere({0, 0, 0}, 0.5, 3);
    EXPECT_EQ(ico.vertices.size(), 642u);
    EXPECT_EQ(ico.faces.size(), 1280u);
}

TEST(MeshHash, SensitiveToEveryAttribute) {
    const Mesh a = load_fixture("cube_artist_uv.obj");
    Mesh b = a;
    EXPECT_EQ(mesh_hash(a), mesh_hash(b));
    b.uv[0].x += 1e-9;
    EXPECT_NE(mesh_hash(a), mesh_hash(b));
    b = a;
    b.vertices[0].z += 1e-9;
    EXPECT_NE(mesh_hash(a), mesh_hash(b));
    b = a;
    std::swap(b.faces[0][0], b.faces[0][1]);
    EXPECT_NE(mesh_hash(a), mesh_hash(b));
}

TEST(Weld, SplitVerticesShareIds) {
    const Mesh m = load_fixture("cube_artist_uv.obj");
    const auto w = weld_positions(m);
    std::set<std::uint32_t> distinct(w.begin(), w.end());
    EXPECT_EQ(distinct.size(), 8u);
    for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_LE(w[i], i);
        EXPECT_EQ(m.vertices[w[i]], m.vertices[i]);
    }
}

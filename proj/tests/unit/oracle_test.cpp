// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "voxvis/error.hpp"
#include "voxvis/oracle.hpp"
#include "voxvis/scene_synth.hpp"

namespace voxvis {
namespace {

int manhattan(const Index3& a, const Index3& b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

TEST(TraverseRay, AxisAlignedRow) {
    VoxelToWorld meta;
    meta.dims = {5, 3, 3};
    meta.voxel_size = 0.5;
    const Ray ray{{-1.0, 0.75, 0.75}, {1, 0, 0}};
    const auto t = traverse_ray(ray, meta);
    ASSERT_EQ(t.visited.size(), 5u);
    for (int x = 0; x < 5; ++x) {
        EXPECT_EQ(t.visited[x], (Index3{x, 1, 1}));
        EXPECT_NEAR(t.entry[x], 1.0 + 0.5 * x, 1e-12);
    }
}

TEST(TraverseRay, MissAndInside) {
    VoxelToWorld meta;
    meta.dims = {4, 4, 4};
    meta.voxel_size = 1.0;
    EXPECT_TRUE(traverse_ray({{-1, -1, -1}, {-1, 0, 0}}, meta).visited.empty());
    EXPECT_TRUE(traverse_ray({{-1, 5, 0.5}, {1, 0, 0}}, meta).visited.empty());
    const auto inside = traverse_ray({{1.5, 1.5, 1.5}, {0, 0, 1}}, meta);
    ASSERT_EQ(inside.visited.size(), 3u);
    EXPECT_EQ(inside.visited[0], (Index3{1, 1, 1}));
    EXPECT_DOUBLE_EQ(inside.entry[0], 0.0);
}

TEST(TraverseRay, FaceAdjacentWalk) {
    VoxelToWorld meta;
    meta.dims = {16, 12, 8};
    meta.voxel_size = 0.3;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> a(-1, 1);
    for (int i = 0; i < 2000; ++i) {
        const Eigen::Vector3d origin(2 + 2 * a(rng), 1.8 + 3 * a(rng), 1.2 + 2 * a(rng));
        const Eigen::Vector3d dir = Eigen::Vector3d(a(rng), a(rng), a(rng)).normalized();
        const auto t = traverse_ray({origin, dir}, meta);
        for (std::size_t k = 0; k < t.visited.size(); ++k) {
            ASSERT_TRUE(meta.dims.contains(t.visited[k]));
            if (k > 0) {
                ASSERT_EQ(manhattan(t.visited[k - 1], t.visited[k]), 1);
                ASSERT_GE(t.entry[k], t.entry[k - 1]);
            }
            // Entry point lies in (or on the boundary of) the cell.
            const Eigen::Vector3d p = meta.to_lattice(origin + dir * t.entry[k]);
            ASSERT_GE(p.x(), t.visited[k].x - 1e-9);
            ASSERT_LE(p.x(), t.visited[k].x + 1 + 1e-9);
            ASSERT_GE(p.z(), t.visited[k].z - 1e-9);
            ASSERT_LE(p.z(), t.visited[k].z + 1 + 1e-9);
        }
    }
}

TEST(PixelRay, ThroughPixelCenter) {
    auto rig = test::simple_rig(100, 100, 100, {1, 1, 1});
    const Ray r = pixel_ray(rig, 50.0, 50.0);
    EXPECT_NEAR((r.direction - Eigen::Vector3d::UnitZ()).norm(), 0.0, 1e-12);
    const Ray s = pixel_ray(rig, 60.0, 50.0);
    EXPECT_NEAR(s.direction.x() / s.direction.z(), 0.1, 1e-12);
    EXPECT_NEAR(s.direction.norm(), 1.0, 1e-12);
}

TEST(CastVisibility, EmptyAndSingle) {
    auto rig = test::simple_rig(16, 8, 8, {3, 3, 3}, 1.0, {-1.5, -1.5, 5});
    SemanticVoxelGrid g(rig.grid);
    EXPECT_TRUE(cast_visibility(g, rig).none());
    g.set(Index3{1, 1, 1}, 3);
    const auto m = cast_visibility(g, rig);
    EXPECT_EQ(m.count(), 1u);
    EXPECT_TRUE(m.test(Index3{1, 1, 1}));
}

TEST(CastVisibility, WallWithVoxelInFront) {
    // 8x8 image, f = 8. Pixel ray u meets the wall face z = 10 at lattice x = u + 0.5,
    // so wall-only rays reach a distinct cell each.
    auto rig = test::simple_rig(8, 8, 8, {8, 8, 5}, 1.25, {-5.0, -5.0, 5.0});
    SemanticVoxelGrid g(rig.grid);
    for (int x = 0; x < 8; ++x) {
        for (int y = 0; y < 8; ++y) {
            g.set(Index3{x, y, 4}, 1);
        }
    }
    EXPECT_EQ(cast_visibility(g, rig, {1, false, 1}).count(), 64u);

    // Front cell (4, 4, 1), z in [6.25, 7.5]. In pixel-index units a ray at u' is inside
    // its x range somewhere along the cell iff u' is in [3.5, 5.1).
    g.set(Index3{4, 4, 1}, 2);
    const auto s1 = cast_visibility(g, rig, {1, false, 1});
    EXPECT_TRUE(s1.test(Index3{4, 4, 1}));
    for (int x : {4, 5}) {
        for (int y : {4, 5}) {
            EXPECT_FALSE(s1.test(Index3{x, y, 4}));
        }
    }
    EXPECT_EQ(s1.count(), 61u);

    // Sub-rays u' = c -/+ 0.25 reach wall column c, and 5.25 passes the front cell,
    // so only wall cell (4, 4) stays fully covered.
    const auto s2 = cast_visibility(g, rig, {2, false, 1});
    EXPECT_TRUE(s2.test(Index3{4, 4, 1}));
    EXPECT_FALSE(s2.test(Index3{4, 4, 4}));
    EXPECT_TRUE(s2.test(Index3{5, 4, 4}));
    EXPECT_TRUE(s2.test(Index3{5, 5, 4}));
    EXPECT_EQ(s2.count(), 64u);
}

TEST(CastVisibility, GuardAndOverride) {
    auto rig = test::simple_rig(4, 4, 4, {129, 128, 256}, 0.01, {0, 0, 5});
    SemanticVoxelGrid g(rig.grid);
    ASSERT_GT(g.size(), kOracleVoxelLimit);
    EXPECT_THROW((void)cast_visibility(g, rig), GuardError);
    EXPECT_THROW((void)render_reference_depth(g, rig), GuardError);
    EXPECT_NO_THROW((void)cast_visibility(g, rig, {1, true, 1}));
    EXPECT_THROW((void)cast_visibility(g, rig, {0, false, 1}), ParameterError);
}

TEST(CastVisibility, CameraInsideOccupiedVoxel) {
    auto rig = test::simple_rig(10, 8, 8, {3, 3, 3}, 1.0, {-1.5, -1.5, -1.5});
    SemanticVoxelGrid g(rig.grid);
    g.set(Index3{1, 1, 1}, 5);
    g.set(Index3{1, 1, 2}, 6);
    const auto m = cast_visibility(g, rig);
    EXPECT_TRUE(m.test(Index3{1, 1, 1}));
    EXPECT_FALSE(m.test(Index3{1, 1, 2}));
}

TEST(CastVisibility, FirstHitHasNoOccupiedPredecessor) {
    SceneSpec spec;
    spec.density = 0.2;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        spec.seed = seed;
        const auto scene = generate(spec);
        for (int v = 0; v < 64; v += 3) {
            for (int u = 0; u < 64; u += 3) {
                const Ray ray = pixel_ray(scene.rig, u + 0.5, v + 0.5);
                const auto t = traverse_ray(ray, scene.grid.meta());
                const auto hit = first_hit(scene.grid, scene.grid.meta(), ray);
                std::size_t k = 0;
                while (k < t.visited.size() && scene.grid.at(t.visited[k]) == 0) {
                    ++k;
                }
                ASSERT_EQ(hit.has_value(), k < t.visited.size());
                if (hit) {
                    EXPECT_EQ(hit->voxel, t.visited[k]);
                    EXPECT_DOUBLE_EQ(hit->distance, t.entry[k]);
                }
            }
        }
    }
}

TEST(CastVisibility, DeletionOnlyUncovers) {
    SceneSpec spec;
    spec.dims = {12, 12, 12};
    std::mt19937_64 rng(99);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        spec.seed = seed;
        spec.density = 0.3;
        auto scene = generate(spec);
        const auto before = cast_visibility(scene.grid, scene.rig);
        const auto occ = extract_occupied(scene.grid);
        const auto victim = occ.indices[rng() % occ.size()];
        scene.grid.set(std::size_t{victim}, 0);
        auto after = cast_visibility(scene.grid, scene.rig);
        after.set(std::size_t{victim});
        EXPECT_TRUE(before.is_subset_of(after));
    }
}

TEST(CastVisibility, OddSupersampleRefinementNests) {
    // Sub-ray offsets (i + 0.5) / s nest only when s' is an odd multiple of s.
    SceneSpec spec;
    spec.density = 0.2;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        spec.seed = seed;
        const auto scene = generate(spec);
        const auto s1 = cast_visibility(scene.grid, scene.rig, {1, false, 1});
        const auto s3 = cast_visibility(scene.grid, scene.rig, {3, false, 1});
        const auto s2 = cast_visibility(scene.grid, scene.rig, {2, false, 1});
        const auto s6 = cast_visibility(scene.grid, scene.rig, {6, false, 2});
        EXPECT_TRUE(s1.is_subset_of(s3));
        EXPECT_TRUE(s2.is_subset_of(s6));
    }
}

TEST(CastVisibility, ThreadCountDoesNotMatter) {
    SceneSpec spec;
    spec.seed = 3;
    const auto scene = generate(spec);
    const auto ref = cast_visibility(scene.grid, scene.rig, {2, false, 1});
    EXPECT_EQ(cast_visibility(scene.grid, scene.rig, {2, false, 4}), ref);
}

TEST(CompareMasks, Examples) {
    const GridDims dims{2, 2, 2};
    VoxelMask a(dims), b(dims);
    EXPECT_DOUBLE_EQ(compare_masks(a, b).iou, 1.0);
    for (std::size_t i : {1, 2, 3}) {
        a.set(i);
    }
    for (std::size_t i : {2, 3, 4}) {
        b.set(i);
    }
    const auto r = compare_masks(a, b);
    EXPECT_DOUBLE_EQ(r.iou, 0.5);
    EXPECT_EQ(r.intersection, 2u);
    EXPECT_EQ(r.union_count, 4u);
    EXPECT_EQ(r.only_a, 1u);
    EXPECT_EQ(r.only_b, 1u);
    const auto same = compare_masks(a, a);
    EXPECT_DOUBLE_EQ(same.iou, 1.0);
    EXPECT_EQ(same.only_a + same.only_b, 0u);
    VoxelMask c(dims);
    c.set(std::size_t{7});
    EXPECT_DOUBLE_EQ(compare_masks(a, c).iou, 0.0);
    EXPECT_THROW((void)compare_masks(a, VoxelMask({2, 2, 1})), ShapeError);
}

}  // namespace
}  // namespace voxvis

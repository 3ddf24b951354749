// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Visible-region label extraction by sparse Z-buffered rasterization of
// voxel cubes.
//
// Each occupied voxel is projected (8 corners), its pixel AABB is sampled on
// a stride-δ lattice, every sample is tested against the six projected faces
// and the smallest interpolated depth competes in a shared depth buffer. A
// voxel is visible iff it owns at least one pixel of the final buffer.
//
// Pixel (u, v) is sampled at its center, image coordinates (u + 0.5, v + 0.5),
// against sub-pixel projected corners. The integer (u, v) from rounding only
// bounds the AABB.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "voxvis/camera_geometry.hpp"
#include "voxvis/voxel_grid.hpp"

namespace voxvis {

inline constexpr int kDefaultStride = 4;
// Depths closer than this are a tie; the lower voxel index wins.
inline constexpr double kDepthTieEpsilon = 1e-6;
// Faces and triangles with |area| below this (pixels²) are degenerate.
inline constexpr double kDegenerateArea = 1e-6;

struct PixelCoord {
    int u = 0;
    int v = 0;
    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

// Inclusive pixel rectangle; empty when min > max on either axis.
struct PixelRect {
    int u_min = 0;
    int v_min = 0;
    int u_max = -1;
    int v_max = -1;

    [[nodiscard]] bool empty() const noexcept { return u_min > u_max || v_min > v_max; }
    [[nodiscard]] int width() const noexcept { return empty() ? 0 : u_max - u_min + 1; }
    [[nodiscard]] int height() const noexcept { return empty() ? 0 : v_max - v_min + 1; }
    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

// AABB of the rounded (u, v) of corners in front of the near plane, clamped
// to a width x height image.
[[nodiscard]] PixelRect voxel_aabb(std::span<const PixelProjection> corners, int width,
                                   int height, double z_min = kDefaultNearPlane);

// min, min + δ, ... up to max, with max appended when the lattice misses it.
[[nodiscard]] std::vector<int> sample_axis(int min, int max, int stride);
// Cartesian product of sample_axis on both axes, row-major (v outer).
[[nodiscard]] std::vector<PixelCoord> sample_pixels(const PixelRect& rect, int stride);

struct FaceQuad {
    std::array<PixelProjection, 4> vertices;
};

// Corner indices of the six cube faces, each a closed cycle.
inline constexpr std::array<std::array<int, 4>, 6> kFaceCorners = {{
    {0, 2, 6, 4},  // -x
    {1, 5, 7, 3},  // +x
    {0, 4, 5, 1},  // -y
    {2, 3, 7, 6},  // +y
    {0, 1, 3, 2},  // -z
    {4, 6, 7, 5},  // +z
}};

[[nodiscard]] std::array<FaceQuad, 6> voxel_faces(const VoxelProjection& projection);

// Signed shoelace area in pixels² over the sub-pixel vertex positions.
[[nodiscard]] double quad_area(const FaceQuad& quad) noexcept;

// Edge-function inclusion: all four (edge × (p − vertex)) share a sign; the
// boundary counts as inside. Degenerate quads contain nothing.
[[nodiscard]] bool point_in_quad(const Eigen::Vector2d& p, const FaceQuad& quad) noexcept;

// Linear depth at p from the triangle (0,1,2) or (0,2,3) that contains it.
// A degenerate triangle falls back to the nearest vertex depth and sets
// `used_fallback`.
[[nodiscard]] double interpolate_depth(const Eigen::Vector2d& p, const FaceQuad& quad,
                                       bool* used_fallback = nullptr) noexcept;

struct DepthBuffer {
    static constexpr std::uint32_t kNoOwner = std::numeric_limits<std::uint32_t>::max();

    int width = 0;
    int height = 0;
    // +inf where nothing was drawn.
    std::vector<double> min_depth;
    // Linear voxel index, kNoOwner where nothing was drawn.
    std::vector<std::uint32_t> owner;

    [[nodiscard]] std::size_t pixel(int u, int v) const noexcept {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(u);
    }
    friend bool operator==(const DepthBuffer&, const DepthBuffer&) = default;
};

struct RasterStats {
    std::uint64_t occupied = 0;
    std::uint64_t clipped = 0;
    std::uint64_t off_screen = 0;
    std::uint64_t visible = 0;
    // Pixels owned by some voxel in the final buffer.
    std::uint64_t pixels_written = 0;
    std::uint64_t degenerate_faces = 0;
    std::uint64_t depth_fallbacks = 0;
    double wall_ms = 0.0;
};

struct RasterOptions {
    int stride = kDefaultStride;
    // 0 = hardware concurrency.
    int threads = 1;
    double z_min = kDefaultNearPlane;
};

struct VisibilityResult {
    VoxelMask mask;
    DepthBuffer depth;
    RasterStats stats;
};

// Output is bitwise identical for every thread count.
// Throws ShapeError when grid and rig dimensions disagree, ParameterError on
// stride < 1.
[[nodiscard]] VisibilityResult rasterize_visibility(const SemanticVoxelGrid& grid,
                                                    const CameraRig& rig,
                                                    const RasterOptions& options = {});

struct VisibleLabels {
    SemanticVoxelGrid labels;  // Y_vis
    VoxelMask mask;            // M_vis
    RasterStats stats;
};

[[nodiscard]] VisibleLabels extract_visible_labels(const SemanticVoxelGrid& grid,
                                                   const CameraRig& rig,
                                                   const RasterOptions& options = {});

// Smallest interpolated depth of `voxel` at the center of `pixel` over the
// faces containing it; nullopt if no face does or the voxel is clipped.
// Uses the reference point_in_quad / interpolate_depth path.
[[nodiscard]] std::optional<double> voxel_depth_at(const Index3& voxel, const PixelCoord& pixel,
                                                   const CameraRig& rig,
                                                   double z_min = kDefaultNearPlane);

}  // namespace voxvis

// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Brute-force visibility by ray casting (Amanatides & Woo grid traversal).
// Slow on purpose; it is the reference the rasterizer is validated against.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "voxvis/camera_geometry.hpp"
#include "voxvis/voxel_grid.hpp"

namespace voxvis {

// Grids above this many voxels are refused unless allow_large is set.
inline constexpr std::size_t kOracleVoxelLimit = std::size_t{1} << 22;
inline constexpr int kDefaultSupersample = 2;

struct Ray {
    Eigen::Vector3d origin;     // world meters
    Eigen::Vector3d direction;  // world, unit length
};

struct RayTraversal {
    Eigen::Vector3d origin;
    Eigen::Vector3d direction;
    // Cells in the order the ray enters them; consecutive cells share a face.
    std::vector<Index3> visited;
    // Ray parameter (meters along `direction`) at which each cell is entered.
    std::vector<double> entry;
};

// Ray through continuous image coordinates (u, v); pixel (i, j) has its
// center at (i + 0.5, j + 0.5).
[[nodiscard]] Ray pixel_ray(const CameraRig& rig, double u, double v);

// Every cell of `grid` the ray passes through, clamped at grid exit.
[[nodiscard]] RayTraversal traverse_ray(const Ray& ray, const VoxelToWorld& grid);

struct RayHit {
    Index3 voxel;
    // Meters along the ray at which the voxel is entered (0 if the ray starts inside it).
    double distance = 0.0;
};

// First occupied voxel along the ray, using the placement in `meta`.
[[nodiscard]] std::optional<RayHit> first_hit(const SemanticVoxelGrid& grid,
                                              const VoxelToWorld& meta, const Ray& ray);

struct OracleOptions {
    // supersample² evenly spaced rays per pixel.
    int supersample = kDefaultSupersample;
    bool allow_large = false;
    int threads = 1;
};

// Union over all rays of the first occupied voxel hit.
// Throws GuardError for grids over kOracleVoxelLimit without allow_large.
[[nodiscard]] VoxelMask cast_visibility(const SemanticVoxelGrid& grid, const CameraRig& rig,
                                        const OracleOptions& options = {});

struct MaskAgreement {
    double iou = 1.0;  // 1.0 when both masks are empty
    std::uint64_t intersection = 0;
    std::uint64_t union_count = 0;
    std::uint64_t only_a = 0;
    std::uint64_t only_b = 0;
};

[[nodiscard]] MaskAgreement compare_masks(const VoxelMask& a, const VoxelMask& b);

}  // namespace voxvis

// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace voxvis {

// Default near plane in meters. Voxels with any corner at or in front of it
// are excluded from rasterization.
inline constexpr double kDefaultNearPlane = 0.1;

struct Index3 {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const Index3&, const Index3&) = default;
};

// Grid extent in voxels. Linear order is x-outermost, z-innermost:
//   linear = x * Y * Z + y * Z + z
struct GridDims {
    int x = 0;
    int y = 0;
    int z = 0;

    friend bool operator==(const GridDims&, const GridDims&) = default;

    [[nodiscard]] std::size_t count() const noexcept {
        return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
               static_cast<std::size_t>(z);
    }
    [[nodiscard]] bool contains(const Index3& i) const noexcept {
        return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < x && i.y < y && i.z < z;
    }
    [[nodiscard]] std::size_t linear(const Index3& i) const noexcept {
        return (static_cast<std::size_t>(i.x) * static_cast<std::size_t>(y) +
                static_cast<std::size_t>(i.y)) *
                   static_cast<std::size_t>(z) +
               static_cast<std::size_t>(i.z);
    }
    [[nodiscard]] Index3 unflatten(std::size_t linear_index) const noexcept {
        const auto zz = static_cast<std::size_t>(z);
        const auto yz = static_cast<std::size_t>(y) * zz;
        return {static_cast<int>(linear_index / yz),
                static_cast<int>((linear_index % yz) / zz),
                static_cast<int>(linear_index % zz)};
    }
    // Throws ParameterError unless every extent is positive.
    void validate() const;
};

// Pinhole intrinsics in pixels; no skew, no distortion.
struct CameraIntrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

    [[nodiscard]] Eigen::Matrix3d matrix() const;
    void validate() const;
};

// x' = rotation * x + translation
struct RigidTransform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    [[nodiscard]] static RigidTransform identity() { return {}; }

    [[nodiscard]] Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
        return rotation * p + translation;
    }
    [[nodiscard]] RigidTransform inverse() const;
    // (this * other)(p) == this(other(p))
    [[nodiscard]] RigidTransform compose(const RigidTransform& other) const;

    // RᵀR = I and det R = +1 within `tol`.
    [[nodiscard]] bool is_proper(double tol = 1e-6) const;
    // Throws ParameterError when the rotation is not proper.
    void validate(double tol = 1e-6) const;
};

// Maps continuous voxel-lattice coordinates to world meters:
//   world = placement.rotation * (voxel_size * p) + placement.translation
// Integer lattice point (i, j, k) is corner 0 of voxel (i, j, k), so the
// translation is the world position of the grid origin corner.
struct VoxelToWorld {
    RigidTransform placement;
    double voxel_size = 0.2;
    GridDims dims;

    [[nodiscard]] const Eigen::Vector3d& origin() const { return placement.translation; }
    [[nodiscard]] Eigen::Vector3d to_world(const Eigen::Vector3d& lattice) const {
        return placement.rotation * (voxel_size * lattice) + placement.translation;
    }
    [[nodiscard]] Eigen::Vector3d to_lattice(const Eigen::Vector3d& world) const {
        return placement.rotation.transpose() * (world - placement.translation) / voxel_size;
    }
    [[nodiscard]] Eigen::Vector3d voxel_center(const Index3& i) const {
        return to_world(Eigen::Vector3d(i.x + 0.5, i.y + 0.5, i.z + 0.5));
    }
    void validate() const;
};

// Everything needed to image a voxel grid: K, [R|t] (world -> camera) and
// the grid placement.
struct CameraRig {
    CameraIntrinsics intrinsics;
    RigidTransform extrinsics;
    VoxelToWorld grid;

    // Camera center in world coordinates.
    [[nodiscard]] Eigen::Vector3d camera_center() const {
        return -(extrinsics.rotation.transpose() * extrinsics.translation);
    }
    void validate() const;
};

struct PixelProjection {
    int u = 0;
    int v = 0;
    double depth = 0.0;
    bool in_bounds = false;
    // Sub-pixel image coordinates before rounding (fx * x / z + cx, ...).
    double u_exact = 0.0;
    double v_exact = 0.0;
};

// Round half away from zero, saturating to a safe integer range.
[[nodiscard]] int round_pixel(double value) noexcept;

// Corners of voxel `index` in world meters. Corner c has offset
// (c & 1, (c >> 1) & 1, (c >> 2) & 1) in lattice units.
[[nodiscard]] std::array<Eigen::Vector3d, 8> voxel_vertices(const Index3& index,
                                                            const VoxelToWorld& grid);

[[nodiscard]] PixelProjection project_camera_point(const Eigen::Vector3d& p_cam,
                                                   const CameraIntrinsics& intrinsics,
                                                   double z_min = kDefaultNearPlane) noexcept;

// Pinhole projection of a world point. Never throws: points behind the near
// plane or outside the image come back with in_bounds == false.
[[nodiscard]] PixelProjection project_point(const Eigen::Vector3d& p_world,
                                            const RigidTransform& extrinsics,
                                            const CameraIntrinsics& intrinsics,
                                            double z_min = kDefaultNearPlane) noexcept;

struct VoxelProjection {
    std::array<PixelProjection, 8> corners;
    // True when any corner has depth <= z_min; such voxels are not rasterized.
    bool clipped = false;
};

[[nodiscard]] VoxelProjection project_voxel(const Index3& index, const CameraRig& rig,
                                            double z_min = kDefaultNearPlane);

// Camera-frame point at depth `depth` on the ray through continuous image
// coordinates (u, v).
[[nodiscard]] Eigen::Vector3d unproject(double u, double v, double depth,
                                        const CameraIntrinsics& intrinsics) noexcept;

// World-to-camera transform for a camera at `center` looking at `target`.
// Camera frame is x right, y down, z forward; `up` fixes the roll.
[[nodiscard]] RigidTransform look_at(const Eigen::Vector3d& center,
                                     const Eigen::Vector3d& target,
                                     const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());

}  // namespace voxvis

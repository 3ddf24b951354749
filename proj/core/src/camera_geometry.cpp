// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/camera_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "voxvis/error.hpp"

namespace voxvis {

void GridDims::validate() const {
    if (x <= 0 || y <= 0 || z <= 0) {
        throw ParameterError("grid dimensions must be positive, got " + std::to_string(x) +
                             "x" + std::to_string(y) + "x" + std::to_string(z));
    }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
    Eigen::Matrix3d k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
}

void CameraIntrinsics::validate() const {
    if (width <= 0 || height <= 0) {
        throw ParameterError("image size must be positive");
    }
    if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
        throw ParameterError("focal lengths must be positive and finite");
    }
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
        throw ParameterError("principal point must lie inside the image");
    }
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
    RigidTransform out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
}

bool RigidTransform::is_proper(double tol) const {
    if (!rotation.allFinite() || !translation.allFinite()) {
        return false;
    }
    const Eigen::Matrix3d gram = rotation.transpose() * rotation;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    return std::abs(rotation.determinant() - 1.0) <= tol;
}

void RigidTransform::validate(double tol) const {
    if (!is_proper(tol)) {
        throw ParameterError("rotation is not orthonormal with determinant +1");
    }
}

void VoxelToWorld::validate() const {
    if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
        throw ParameterError("voxel size must be positive");
    }
    placement.validate();
    dims.validate();
}

void CameraRig::validate() const {
    intrinsics.validate();
    extrinsics.validate();
    grid.validate();
}

int round_pixel(double value) noexcept {
    // Keeps lround well-defined for points that project near infinity.
    constexpr double kLimit = 1 << 30;
    if (std::isnan(value)) {
        return -(1 << 30);
    }
    return static_cast<int>(std::lround(std::clamp(value, -kLimit, kLimit)));
}

std::array<Eigen::Vector3d, 8> voxel_vertices(const Index3& index, const VoxelToWorld& grid) {
    if (!grid.dims.contains(index)) {
        throw BoundsError("voxel (" + std::to_string(index.x) + "," + std::to_string(index.y) +
                          "," + std::to_string(index.z) + ") outside grid");
    }
    std::array<Eigen::Vector3d, 8> out;
    for (int c = 0; c < 8; ++c) {
        const Eigen::Vector3d lattice(index.x + (c & 1), index.y + ((c >> 1) & 1),
                                      index.z + ((c >> 2) & 1));
        out[c] = grid.to_world(lattice);
    }
    return out;
}

PixelProjection project_camera_point(const Eigen::Vector3d& p_cam,
                                     const CameraIntrinsics& intrinsics,
                                     double z_min) noexcept {
    PixelProjection out;
    out.depth = p_cam.z();
    if (!(p_cam.z() > z_min)) {
        // Still report something finite for diagnostics; never in bounds.
        const double z = p_cam.z() == 0.0 ? -1e-12 : p_cam.z();
        out.u_exact = intrinsics.fx * p_cam.x() / z + intrinsics.cx;
        out.v_exact = intrinsics.fy * p_cam.y() / z + intrinsics.cy;
        out.u = round_pixel(out.u_exact);
        out.v = round_pixel(out.v_exact);
        out.in_bounds = false;
        return out;
    }
    out.u_exact = intrinsics.fx * p_cam.x() / p_cam.z() + intrinsics.cx;
    out.v_exact = intrinsics.fy * p_cam.y() / p_cam.z() + intrinsics.cy;
    out.u = round_pixel(out.u_exact);
    out.v = round_pixel(out.v_exact);
    out.in_bounds =
        out.u >= 0 && out.u < intrinsics.width && out.v >= 0 && out.v < intrinsics.height;
    return out;
}

PixelProjection project_point(const Eigen::Vector3d& p_world, const RigidTransform& extrinsics,
                              const CameraIntrinsics& intrinsics, double z_min) noexcept {
    return project_camera_point(extrinsics.apply(p_world), intrinsics, z_min);
}

VoxelProjection project_voxel(const Index3& index, const CameraRig& rig, double z_min) {
    const auto corners = voxel_vertices(index, rig.grid);
    VoxelProjection out;
    for (int c = 0; c < 8; ++c) {
        out.corners[c] = project_point(corners[c], rig.extrinsics, rig.intrinsics, z_min);
        if (!(out.corners[c].depth > z_min)) {
            out.clipped = true;
        }
    }
    return out;
}

Eigen::Vector3d unproject(double u, double v, double depth,
                          const CameraIntrinsics& intrinsics) noexcept {
    return {(u - intrinsics.cx) * depth / intrinsics.fx,
            (v - intrinsics.cy) * depth / intrinsics.fy, depth};
}

RigidTransform look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up) {
    Eigen::Vector3d forward = target - center;
    if (forward.norm() < 1e-12) {
        throw ParameterError("look_at: target coincides with camera center");
    }
    forward.normalize();
    Eigen::Vector3d right = forward.cross(up);
    if (right.norm() < 1e-9) {
        // Looking straight along `up`; any perpendicular works.
        right = forward.unitOrthogonal();
    }
    right.normalize();
    const Eigen::Vector3d down = forward.cross(right);

    RigidTransform world_to_camera;
    world_to_camera.rotation.row(0) = right.transpose();
    world_to_camera.rotation.row(1) = down.transpose();
    world_to_camera.rotation.row(2) = forward.transpose();
    world_to_camera.translation = -(world_to_camera.rotation * center);
    return world_to_camera;
}

}  // namespace voxvis

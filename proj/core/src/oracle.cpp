// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "voxvis/error.hpp"
#include "voxvis/parallel.hpp"

namespace voxvis {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Incremental cell walk in lattice coordinates. `visit(cell, t)` returns true
// to stop early.
template <typename Visit>
void walk(const Ray& ray, const VoxelToWorld& grid, Visit&& visit) {
    const Eigen::Vector3d o = grid.to_lattice(ray.origin);
    const Eigen::Vector3d d = grid.placement.rotation.transpose() * ray.direction / grid.voxel_size;
    const int extent[3] = {grid.dims.x, grid.dims.y, grid.dims.z};

    double t_enter = 0.0;
    double t_exit = kInf;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < 0.0 || o[a] > extent[a]) {
                return;
            }
            continue;
        }
        double t0 = (0.0 - o[a]) / d[a];
        double t1 = (extent[a] - o[a]) / d[a];
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
    }
    if (t_enter > t_exit) {
        return;
    }

    const Eigen::Vector3d start = o + t_enter * d;
    int cell[3];
    int step[3];
    double t_max[3];
    double t_delta[3];
    for (int a = 0; a < 3; ++a) {
        cell[a] = std::clamp(static_cast<int>(std::floor(start[a])), 0, extent[a] - 1);
        if (d[a] > 0.0) {
            step[a] = 1;
            t_delta[a] = 1.0 / d[a];
            t_max[a] = t_enter + (cell[a] + 1 - start[a]) / d[a];
        } else if (d[a] < 0.0) {
            step[a] = -1;
            t_delta[a] = -1.0 / d[a];
            t_max[a] = t_enter + (cell[a] - start[a]) / d[a];
        } else {
            step[a] = 0;
            t_delta[a] = kInf;
            t_max[a] = kInf;
        }
    }

    double t = t_enter;
    for (;;) {
        if (visit(Index3{cell[0], cell[1], cell[2]}, t)) {
            return;
        }
        int axis = 0;
        if (t_max[1] < t_max[axis]) {
            axis = 1;
        }
        if (t_max[2] < t_max[axis]) {
            axis = 2;
        }
        if (t_max[axis] > t_exit) {
            return;
        }
        t = t_max[axis];
        cell[axis] += step[axis];
        if (cell[axis] < 0 || cell[axis] >= extent[axis]) {
            return;
        }
        t_max[axis] += t_delta[axis];
    }
}

}  // namespace

Ray pixel_ray(const CameraRig& rig, double u, double v) {
    const auto& k = rig.intrinsics;
    const Eigen::Vector3d dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
    return {rig.camera_center(), (rig.extrinsics.rotation.transpose() * dir_cam).normalized()};
}

RayTraversal traverse_ray(const Ray& ray, const VoxelToWorld& grid) {
    RayTraversal out{ray.origin, ray.direction, {}, {}};
    walk(ray, grid, [&](const Index3& cell, double t) {
        out.visited.push_back(cell);
        out.entry.push_back(t);
        return false;
    });
    return out;
}

std::optional<RayHit> first_hit(const SemanticVoxelGrid& grid, const VoxelToWorld& meta,
                                const Ray& ray) {
    std::optional<RayHit> hit;
    walk(ray, meta, [&](const Index3& cell, double t) {
        if (grid.at(cell) != kEmptyLabel) {
            hit = RayHit{cell, t};
            return true;
        }
        return false;
    });
    return hit;
}

VoxelMask cast_visibility(const SemanticVoxelGrid& grid, const CameraRig& rig,
                          const OracleOptions& options) {
    if (!(grid.dims() == rig.grid.dims)) {
        throw ShapeError("label grid dimensions differ from calibration dims");
    }
    if (options.supersample < 1) {
        throw ParameterError("supersample must be >= 1");
    }
    if (grid.size() > kOracleVoxelLimit && !options.allow_large) {
        throw GuardError("grid has " + std::to_string(grid.size()) +
                         " voxels; ray casting is limited to " +
                         std::to_string(kOracleVoxelLimit) + " without the override");
    }
    rig.validate();

    VoxelMask mask(grid.dims());
    const int s = options.supersample;
    const int width = rig.intrinsics.width;
    parallel_chunks(static_cast<std::size_t>(rig.intrinsics.height), 4, options.threads,
                    [&](std::size_t row_begin, std::size_t row_end) {
                        for (std::size_t row = row_begin; row < row_end; ++row) {
                            for (int u = 0; u < width; ++u) {
                                for (int j = 0; j < s; ++j) {
                                    for (int i = 0; i < s; ++i) {
                                        const Ray ray = pixel_ray(
                                            rig, u + (i + 0.5) / s,
                                            static_cast<double>(row) + (j + 0.5) / s);
                                        if (const auto hit = first_hit(grid, rig.grid, ray)) {
                                            mask.set_atomic(grid.dims().linear(hit->voxel));
                                        }
                                    }
                                }
                            }
                        }
                    });
    return mask;
}

MaskAgreement compare_masks(const VoxelMask& a, const VoxelMask& b) {
    if (!(a.dims() == b.dims())) {
        throw ShapeError("compare_masks: mask dimensions differ");
    }
    MaskAgreement out;
    for (std::size_t i = 0; i < a.bytes().size(); ++i) {
        const std::uint8_t x = a.bytes()[i];
        const std::uint8_t y = b.bytes()[i];
        out.intersection += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(x & y)));
        out.union_count += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(x | y)));
        out.only_a += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(x & ~y)));
        out.only_b += static_cast<std::uint64_t>(std::popcount(static_cast<std::uint8_t>(y & ~x)));
    }
    out.iou = out.union_count == 0
                  ? 1.0
                  : static_cast<double>(out.intersection) / static_cast<double>(out.union_count);
    return out;
}

}  // namespace voxvis

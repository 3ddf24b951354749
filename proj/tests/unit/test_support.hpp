// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "voxvis/camera_geometry.hpp"
#include "voxvis/voxel_grid.hpp"

namespace voxvis::test {

// Camera at the origin looking down +z, grid placed by the caller.
inline CameraRig simple_rig(double f, int w, int h, GridDims dims, double size = 1.0,
                            Eigen::Vector3d origin = Eigen::Vector3d::Zero()) {
    CameraRig rig;
    rig.intrinsics = {f, f, w / 2.0, h / 2.0, w, h};
    rig.grid.dims = dims;
    rig.grid.voxel_size = size;
    rig.grid.placement.translation = origin;
    return rig;
}

inline SemanticVoxelGrid random_grid(const VoxelToWorld& meta, double density, int num_classes,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> label(1, num_classes - 1);
    SemanticVoxelGrid g(meta);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u(rng) < density) {
            g.set(i, static_cast<Label>(label(rng)));
        }
    }
    return g;
}

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("voxvis-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace voxvis::test

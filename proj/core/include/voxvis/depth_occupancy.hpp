// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "voxvis/camera_geometry.hpp"
#include "voxvis/voxel_mask.hpp"

namespace voxvis {

// Per-pixel camera-frame z in meters, row-major. Values <= 0 or non-finite
// mark pixels without depth.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> depth;

    DepthMap() = default;
    DepthMap(int w, int h, float fill = 0.0f)
        : width(w), height(h), depth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    [[nodiscard]] static bool is_valid(float d) noexcept { return std::isfinite(d) && d > 0.0f; }
    [[nodiscard]] float& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
    [[nodiscard]] float at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
    [[nodiscard]] std::size_t valid_count() const noexcept;

    friend bool operator==(const DepthMap& a, const DepthMap& b);
};

enum class DepthFormat {
    Raw32,  // little-endian float32, row-major, no header
    Png16,  // 16-bit grayscale PNG, meters = value / 256, 0 = no depth
};

inline constexpr double kPng16Scale = 256.0;

// "raw32" | "png16"; anything else is a ParameterError.
[[nodiscard]] DepthFormat parse_depth_format(std::string_view tag);
[[nodiscard]] std::string_view to_string(DepthFormat format) noexcept;

[[nodiscard]] std::vector<std::uint8_t> encode_depth(const DepthMap& depth, DepthFormat format);
// Raw data carries no size, so width/height are required. For PNG they are
// checked against the header when positive.
[[nodiscard]] DepthMap decode_depth(std::span<const std::uint8_t> bytes, DepthFormat format,
                                    int width, int height);

[[nodiscard]] DepthMap load_depth(const std::filesystem::path& path, DepthFormat format,
                                  int width, int height);
void save_depth(const std::filesystem::path& path, const DepthMap& depth, DepthFormat format);

struct OccupancyOptions {
    // Optional cubic dilation of the splatted mask, in voxels.
    int dilate = 0;
    int threads = 1;
};

// Back-projects every valid pixel center to 3-D and sets the voxel containing
// it (floor of the lattice coordinate). Points outside the grid are skipped.
// Throws ShapeError when the depth map and intrinsics sizes differ.
[[nodiscard]] VoxelMask occupancy_from_depth(const DepthMap& depth, const CameraRig& rig,
                                             const OccupancyOptions& options = {});

}  // namespace voxvis

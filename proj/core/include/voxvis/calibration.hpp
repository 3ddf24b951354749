// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Calibration text format, one `key: values` line per entry, `#` comments:
//
//   K:          9 floats, row-major 3x3 intrinsic matrix (no skew)
//   Rt:         12 floats, row-major 3x4 world-to-camera [R|t]
//   vox_origin: 3 floats, world position of the grid corner, meters
//   vox_size:   1 float, meters
//   dims:       3 integers X Y Z
//   image_size: 2 integers, width height
//
// Every key must appear exactly once.

#include <filesystem>
#include <string>
#include <string_view>

#include "voxvis/camera_geometry.hpp"

namespace voxvis {

[[nodiscard]] CameraRig parse_calibration(std::string_view text);
// Shortest round-trip decimal representation; parse(format(rig)) == rig bitwise.
[[nodiscard]] std::string format_calibration(const CameraRig& rig);

[[nodiscard]] CameraRig load_calibration(const std::filesystem::path& path);
void save_calibration(const std::filesystem::path& path, const CameraRig& rig);

}  // namespace voxvis

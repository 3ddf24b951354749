// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Binary little-endian PLY of occupied voxel centers. Vertex layout:
//   float x, y, z (world meters) | uchar red, green, blue | ushort label
// Colors come from class_color().

#include <cstdint>
#include <filesystem>
#include <vector>

#include "voxvis/voxel_grid.hpp"

namespace voxvis {

// `only`, when given, restricts output to voxels whose bit is set.
[[nodiscard]] std::vector<std::uint8_t> encode_ply(const SemanticVoxelGrid& grid,
                                                   const VoxelMask* only = nullptr);
void save_ply(const std::filesystem::path& path, const SemanticVoxelGrid& grid,
              const VoxelMask* only = nullptr);

}  // namespace voxvis

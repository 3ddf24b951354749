// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Headerless benchmark file formats. Dimensions always come from elsewhere.
//
//   .label  little-endian uint16 per voxel, canonical linear order
//   .mask   MSB-first packed bits, ceil(X*Y*Z / 8) bytes

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "voxvis/voxel_grid.hpp"

namespace voxvis {

[[nodiscard]] std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
// Writes through a sibling temporary file and renames it into place.
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

[[nodiscard]] std::vector<std::uint8_t> encode_labels(std::span<const Label> labels);
[[nodiscard]] std::vector<Label> decode_labels(std::span<const std::uint8_t> bytes,
                                               std::size_t count);

[[nodiscard]] SemanticVoxelGrid load_labels(const std::filesystem::path& path,
                                            const VoxelToWorld& meta);
void save_labels(const std::filesystem::path& path, const SemanticVoxelGrid& grid);

[[nodiscard]] VoxelMask load_mask(const std::filesystem::path& path, const GridDims& dims);
void save_mask(const std::filesystem::path& path, const VoxelMask& mask);

}  // namespace voxvis

// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/ply.hpp"

#include <bit>
#include <string>

#include "voxvis/class_palette.hpp"
#include "voxvis/error.hpp"
#include "voxvis/grid_io.hpp"

namespace voxvis {
namespace {

constexpr std::array<Rgb, 20> kSemanticKittiColors = {{
    {0, 0, 0},       {100, 150, 245}, {100, 230, 245}, {30, 60, 150},   {80, 30, 180},
    {0, 0, 255},     {255, 30, 30},   {255, 40, 200},  {150, 30, 90},   {255, 0, 255},
    {255, 150, 255}, {75, 0, 75},     {175, 0, 75},    {255, 200, 0},   {255, 120, 50},
    {0, 175, 0},     {135, 60, 0},    {150, 240, 80},  {255, 240, 150}, {255, 0, 0},
}};

void put_f32(std::vector<std::uint8_t>& out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) {
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
}

}  // namespace

Rgb class_color(std::uint16_t label) noexcept {
    if (label < kSemanticKittiColors.size()) {
        return kSemanticKittiColors[label];
    }
    if (label == kInvalidLabel) {
        return {255, 255, 255};
    }
    // splitmix-style finalizer; any fixed bijection would do.
    std::uint32_t h = label * 0x9E3779B9u;
    h ^= h >> 16;
    h *= 0x85EBCA6Bu;
    h ^= h >> 13;
    return {static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8),
            static_cast<std::uint8_t>(h >> 16)};
}

std::string_view class_name(std::uint16_t label) noexcept {
    return label < kSemanticKittiClasses.size() ? kSemanticKittiClasses[label] : std::string_view{};
}

std::vector<std::uint8_t> encode_ply(const SemanticVoxelGrid& grid, const VoxelMask* only) {
    if (only != nullptr && !(only->dims() == grid.dims())) {
        throw ShapeError("export mask dimensions differ from grid");
    }
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.at(i) != kEmptyLabel && (only == nullptr || only->test(i))) {
            selected.push_back(i);
        }
    }
    const std::string header = "ply\n"
                               "format binary_little_endian 1.0\n"
                               "comment voxvis occupied voxel centers\n"
                               "element vertex " +
                               std::to_string(selected.size()) +
                               "\n"
                               "property float x\n"
                               "property float y\n"
                               "property float z\n"
                               "property uchar red\n"
                               "property uchar green\n"
                               "property uchar blue\n"
                               "property ushort label\n"
                               "end_header\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + selected.size() * 17);
    for (const std::size_t i : selected) {
        const Eigen::Vector3d c = grid.meta().voxel_center(grid.dims().unflatten(i));
        put_f32(out, static_cast<float>(c.x()));
        put_f32(out, static_cast<float>(c.y()));
        put_f32(out, static_cast<float>(c.z()));
        const Label label = grid.at(i);
        const Rgb rgb = class_color(label);
        out.push_back(rgb.r);
        out.push_back(rgb.g);
        out.push_back(rgb.b);
        out.push_back(static_cast<std::uint8_t>(label & 0xFF));
        out.push_back(static_cast<std::uint8_t>(label >> 8));
    }
    return out;
}

void save_ply(const std::filesystem::path& path, const SemanticVoxelGrid& grid,
              const VoxelMask* only) {
    write_file_bytes(path, encode_ply(grid, only));
}

}  // namespace voxvis

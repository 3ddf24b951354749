// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace voxvis {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// The 20-class SemanticKITTI SSC label set, class 0 = empty.
inline constexpr std::array<std::string_view, 20> kSemanticKittiClasses = {
    "empty",    "car",      "bicycle",     "motorcycle", "truck",      "other-vehicle", "person",
    "bicyclist", "motorcyclist", "road",   "parking",    "sidewalk",   "other-ground",  "building",
    "fence",    "vegetation", "trunk",     "terrain",    "pole",       "traffic-sign"};

// Colors 0..19 follow the SemanticKITTI color map (RGB). Other ids get a
// color from a fixed integer hash of the id; kInvalidLabel (255) is white.
[[nodiscard]] Rgb class_color(std::uint16_t label) noexcept;

// Empty for ids outside the table.
[[nodiscard]] std::string_view class_name(std::uint16_t label) noexcept;

}  // namespace voxvis

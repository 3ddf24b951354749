// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Deterministic synthetic scenes and cameras for tests and benchmarks.
//
// Randomness comes from CounterRng, a SplitMix64 output function evaluated at
// a counter: draw k (k = 1, 2, ...) of stream s under seed S is
//   mix64(key(S, s) + k * 0x9E3779B97F4A7C15),  key(S, s) = mix64(S ^ mix64(s + γ))
// with the standard SplitMix64 finalizer. Generation uses only IEEE basic
// operations and sqrt, so a fixed SceneSpec produces the same bits on every
// conforming platform.

#include <cstdint>
#include <string_view>

#include "voxvis/camera_geometry.hpp"
#include "voxvis/depth_occupancy.hpp"
#include "voxvis/voxel_grid.hpp"

namespace voxvis {

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    [[nodiscard]] static std::uint64_t mix64(std::uint64_t z) noexcept;

    [[nodiscard]] std::uint64_t next() noexcept;
    // [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() noexcept;
    [[nodiscard]] double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    // [0, n) by 128-bit multiply-shift; n must be > 0.
    [[nodiscard]] std::uint64_t below(std::uint64_t n) noexcept;
    [[nodiscard]] int range(int lo, int hi) noexcept {  // inclusive
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class Motif {
    Random,       // i.i.d. occupancy with probability `density`
    Wall,         // full slab near the far x face plus boxes in front
    Corridor,     // floor, two side walls and thin poles
    GroundBoxes,  // ground layer plus boxes standing on it
};

enum class CameraPlacement {
    Front,  // behind the x = 0 face looking along +x, grid partly to fully in view
    Orbit,  // on a sphere around the grid, looking at its center
    Fuzz,   // anywhere around or inside the grid, any roll
    Kitti,  // KITTI-style: at the x = 0 face, ~1.8 m above the ground layer
};

struct SceneSpec {
    std::uint64_t seed = 0;
    GridDims dims{16, 16, 16};
    // Random: occupancy probability. Structured motifs: boxes/poles are added
    // until the occupied fraction reaches it. 0 always gives an empty grid.
    double density = 0.2;
    Motif motif = Motif::Random;
    CameraPlacement camera = CameraPlacement::Front;
    double voxel_size = 0.2;
    int image_width = 64;
    int image_height = 64;
    // Labels are drawn from 1..num_classes-1.
    int num_classes = 20;
};

struct SynthScene {
    SemanticVoxelGrid grid;
    CameraRig rig;
};

// Throws ParameterError on density outside [0, 1], non-positive sizes or
// num_classes < 2.
[[nodiscard]] SynthScene generate(const SceneSpec& spec);

[[nodiscard]] Motif parse_motif(std::string_view name);
[[nodiscard]] std::string_view to_string(Motif motif) noexcept;
[[nodiscard]] CameraPlacement parse_camera_placement(std::string_view name);
[[nodiscard]] std::string_view to_string(CameraPlacement placement) noexcept;

// First-hit camera-frame depth through every pixel center, 0 where the ray
// misses. Same size guard as cast_visibility.
[[nodiscard]] DepthMap render_reference_depth(const SemanticVoxelGrid& grid, const CameraRig& rig,
                                              bool allow_large = false);

}  // namespace voxvis

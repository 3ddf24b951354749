// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "voxvis/camera_geometry.hpp"
#include "voxvis/voxel_mask.hpp"

namespace voxvis {

using Label = std::uint16_t;

inline constexpr Label kEmptyLabel = 0;
// Reserved "unknowable" label used by public SSC benchmarks. Such voxels still
// occlude but are skipped by metrics.
inline constexpr Label kInvalidLabel = 255;

// Dense semantic labels over a placed voxel grid.
class SemanticVoxelGrid {
public:
    SemanticVoxelGrid() = default;
    explicit SemanticVoxelGrid(const VoxelToWorld& meta);
    // Throws ShapeError if labels.size() != meta.dims.count().
    SemanticVoxelGrid(const VoxelToWorld& meta, std::vector<Label> labels);

    [[nodiscard]] const GridDims& dims() const noexcept { return meta_.dims; }
    [[nodiscard]] const VoxelToWorld& meta() const noexcept { return meta_; }
    [[nodiscard]] std::span<const Label> labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }

    [[nodiscard]] Label at(std::size_t linear) const noexcept { return labels_[linear]; }
    [[nodiscard]] Label at(const Index3& i) const noexcept { return labels_[meta_.dims.linear(i)]; }
    void set(std::size_t linear, Label label) noexcept { labels_[linear] = label; }
    void set(const Index3& i, Label label) noexcept { labels_[meta_.dims.linear(i)] = label; }

    // Optional mask of voxels whose ground truth is unknowable.
    [[nodiscard]] const std::optional<VoxelMask>& invalid() const noexcept { return invalid_; }
    void set_invalid(VoxelMask mask);
    void clear_invalid() noexcept { invalid_.reset(); }

    friend bool operator==(const SemanticVoxelGrid& a, const SemanticVoxelGrid& b) {
        return a.meta_.dims == b.meta_.dims && a.labels_ == b.labels_ && a.invalid_ == b.invalid_;
    }

private:
    VoxelToWorld meta_;
    std::vector<Label> labels_;
    std::optional<VoxelMask> invalid_;
};

// Voxels with a nonzero label, strictly increasing linear index.
struct OccupiedSet {
    GridDims dims;
    std::vector<std::uint32_t> indices;

    [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
    [[nodiscard]] bool empty() const noexcept { return indices.empty(); }
    [[nodiscard]] Index3 index3(std::size_t i) const noexcept { return dims.unflatten(indices[i]); }
};

[[nodiscard]] OccupiedSet extract_occupied(const SemanticVoxelGrid& grid);
[[nodiscard]] VoxelMask occupied_mask(const SemanticVoxelGrid& grid);

// Y ⊙ M: keeps labels where the mask is set, zero elsewhere. The invalid mask
// is carried over unchanged.
[[nodiscard]] SemanticVoxelGrid apply_mask(const SemanticVoxelGrid& grid, const VoxelMask& mask);

}  // namespace voxvis

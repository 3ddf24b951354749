// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/voxel_grid.hpp"

#include <limits>
#include <string>

#include "voxvis/error.hpp"

namespace voxvis {

SemanticVoxelGrid::SemanticVoxelGrid(const VoxelToWorld& meta)
    : meta_(meta), labels_(meta.dims.count(), kEmptyLabel) {}

SemanticVoxelGrid::SemanticVoxelGrid(const VoxelToWorld& meta, std::vector<Label> labels)
    : meta_(meta), labels_(std::move(labels)) {
    if (labels_.size() != meta_.dims.count()) {
        throw ShapeError("label array has " + std::to_string(labels_.size()) +
                         " entries, grid needs " + std::to_string(meta_.dims.count()));
    }
}

void SemanticVoxelGrid::set_invalid(VoxelMask mask) {
    if (!(mask.dims() == meta_.dims)) {
        throw ShapeError("invalid mask dimensions differ from grid");
    }
    invalid_ = std::move(mask);
}

OccupiedSet extract_occupied(const SemanticVoxelGrid& grid) {
    if (grid.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("grid too large for 32-bit voxel indices");
    }
    OccupiedSet out;
    out.dims = grid.dims();
    const auto labels = grid.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kEmptyLabel) {
            out.indices.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return out;
}

VoxelMask occupied_mask(const SemanticVoxelGrid& grid) {
    VoxelMask mask(grid.dims());
    const auto labels = grid.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kEmptyLabel) {
            mask.set(i);
        }
    }
    return mask;
}

SemanticVoxelGrid apply_mask(const SemanticVoxelGrid& grid, const VoxelMask& mask) {
    if (!(grid.dims() == mask.dims())) {
        throw ShapeError("apply_mask: grid and mask dimensions differ");
    }
    std::vector<Label> out(grid.labels().begin(), grid.labels().end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!mask.test(i)) {
            out[i] = kEmptyLabel;
        }
    }
    SemanticVoxelGrid result(grid.meta(), std::move(out));
    if (grid.invalid()) {
        result.set_invalid(*grid.invalid());
    }
    return result;
}

}  // namespace voxvis

// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Semantic scene completion metrics.
//
// Geometric IoU binarizes labels (nonzero = occupied). Semantic IoU is per
// class c in 1..N-1 (class 0 is empty space):
//   IoU_c = tp_c / (tp_c + fp_c + fn_c)
// mIoU averages the classes with a nonzero union, or all of 1..N-1 in strict
// mode, and miou_loss = 1 - mIoU.
//
// A voxel is skipped everywhere when the invalid mask marks it or when its
// ground truth carries kInvalidLabel.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "voxvis/voxel_grid.hpp"

namespace voxvis {

struct ClassScore {
    int id = 0;
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    // Absent when the class does not enter the mean.
    std::optional<double> iou;
};

struct EvalReport {
    double iou = 1.0;
    double miou = 1.0;
    double miou_loss = 0.0;
    std::vector<ClassScore> per_class;  // classes 1..N-1
    std::uint64_t evaluated = 0;
};

class ClassConfusion {
public:
    explicit ClassConfusion(int num_classes);

    // Tallies one prediction/ground-truth pair. `invalid` is combined with
    // gt.invalid() when both exist. Throws ShapeError, or DataError listing
    // labels >= num_classes.
    void add(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
             const VoxelMask* invalid = nullptr);
    // Counterwise addition. Throws ParameterError on a class-count mismatch.
    ClassConfusion& merge(const ClassConfusion& other);

    [[nodiscard]] EvalReport finalize(bool strict_classes = false) const;

    [[nodiscard]] int num_classes() const noexcept { return num_classes_; }
    [[nodiscard]] std::uint64_t tp(int c) const { return tp_.at(c); }
    [[nodiscard]] std::uint64_t fp(int c) const { return fp_.at(c); }
    [[nodiscard]] std::uint64_t fn(int c) const { return fn_.at(c); }
    [[nodiscard]] std::uint64_t geometric_tp() const noexcept { return geo_tp_; }
    [[nodiscard]] std::uint64_t geometric_fp() const noexcept { return geo_fp_; }
    [[nodiscard]] std::uint64_t geometric_fn() const noexcept { return geo_fn_; }
    [[nodiscard]] std::uint64_t evaluated() const noexcept { return evaluated_; }

    friend bool operator==(const ClassConfusion&, const ClassConfusion&) = default;

private:
    int num_classes_;
    std::vector<std::uint64_t> tp_, fp_, fn_;
    std::uint64_t geo_tp_ = 0, geo_fp_ = 0, geo_fn_ = 0;
    std::uint64_t evaluated_ = 0;
};

// Returns `confusion` with the pair tallied in.
[[nodiscard]] ClassConfusion accumulate(ClassConfusion confusion, const SemanticVoxelGrid& pred,
                                        const SemanticVoxelGrid& gt,
                                        const VoxelMask* invalid = nullptr);

// 1.0 when neither grid has an occupied evaluated voxel.
[[nodiscard]] double geometric_iou(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
                                   const VoxelMask* invalid = nullptr);

[[nodiscard]] EvalReport semantic_miou(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
                                       const VoxelMask* invalid, int num_classes,
                                       bool strict_classes = false);

// Aligned text table: IoU, mIoU, then one column per class, in percent.
[[nodiscard]] std::string format_report_table(const EvalReport& report,
                                              const std::string& row_name = "prediction");

}  // namespace voxvis

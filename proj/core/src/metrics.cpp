// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "voxvis/class_palette.hpp"
#include "voxvis/error.hpp"

namespace voxvis {
namespace {

bool excluded(std::size_t i, const SemanticVoxelGrid& gt, const VoxelMask* a,
              const VoxelMask* b) {
    return gt.at(i) == kInvalidLabel || (a != nullptr && a->test(i)) ||
           (b != nullptr && b->test(i));
}

void check_shapes(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
                  const VoxelMask* invalid) {
    if (!(pred.dims() == gt.dims())) {
        throw ShapeError("prediction and ground truth dimensions differ");
    }
    if (invalid != nullptr && !(invalid->dims() == gt.dims())) {
        throw ShapeError("invalid mask dimensions differ from ground truth");
    }
}

std::string list_labels(const std::set<Label>& labels) {
    std::string out;
    int shown = 0;
    for (const Label l : labels) {
        if (shown++ == 16) {
            out += ", ...";
            break;
        }
        out += (out.empty() ? "" : ", ") + std::to_string(l);
    }
    return out;
}

double ratio(std::uint64_t num, std::uint64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassConfusion::ClassConfusion(int num_classes)
    : num_classes_(num_classes),
      tp_(static_cast<std::size_t>(std::max(num_classes, 0)), 0),
      fp_(tp_.size(), 0),
      fn_(tp_.size(), 0) {
    if (num_classes < 2 || num_classes > kInvalidLabel) {
        throw ParameterError("num_classes must be in [2, 255], got " +
                             std::to_string(num_classes));
    }
}

void ClassConfusion::add(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
                         const VoxelMask* invalid) {
    check_shapes(pred, gt, invalid);
    const VoxelMask* gt_invalid = gt.invalid() ? &*gt.invalid() : nullptr;

    std::set<Label> bad_gt;
    std::set<Label> bad_pred;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (excluded(i, gt, invalid, gt_invalid)) {
            continue;
        }
        if (gt.at(i) >= num_classes_) {
            bad_gt.insert(gt.at(i));
        }
        if (pred.at(i) >= num_classes_) {
            bad_pred.insert(pred.at(i));
        }
    }
    if (!bad_gt.empty() || !bad_pred.empty()) {
        std::string msg = "labels outside [0, " + std::to_string(num_classes_) + ")";
        if (!bad_gt.empty()) {
            msg += "; ground truth: " + list_labels(bad_gt);
        }
        if (!bad_pred.empty()) {
            msg += "; prediction: " + list_labels(bad_pred);
        }
        throw DataError(msg);
    }

    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (excluded(i, gt, invalid, gt_invalid)) {
            continue;
        }
        ++evaluated_;
        const Label p = pred.at(i);
        const Label g = gt.at(i);
        const bool p_occ = p != kEmptyLabel;
        const bool g_occ = g != kEmptyLabel;
        geo_tp_ += (p_occ && g_occ) ? 1 : 0;
        geo_fp_ += (p_occ && !g_occ) ? 1 : 0;
        geo_fn_ += (!p_occ && g_occ) ? 1 : 0;
        if (p == g) {
            ++tp_[p];
        } else {
            ++fp_[p];
            ++fn_[g];
        }
    }
}

ClassConfusion& ClassConfusion::merge(const ClassConfusion& other) {
    if (other.num_classes_ != num_classes_) {
        throw ParameterError("cannot merge confusions with " + std::to_string(num_classes_) +
                             " and " + std::to_string(other.num_classes_) + " classes");
    }
    for (std::size_t c = 0; c < tp_.size(); ++c) {
        tp_[c] += other.tp_[c];
        fp_[c] += other.fp_[c];
        fn_[c] += other.fn_[c];
    }
    geo_tp_ += other.geo_tp_;
    geo_fp_ += other.geo_fp_;
    geo_fn_ += other.geo_fn_;
    evaluated_ += other.evaluated_;
    return *this;
}

EvalReport ClassConfusion::finalize(bool strict_classes) const {
    EvalReport report;
    report.evaluated = evaluated_;
    const std::uint64_t geo_union = geo_tp_ + geo_fp_ + geo_fn_;
    report.iou = geo_union == 0 ? 1.0 : ratio(geo_tp_, geo_union);

    double sum = 0.0;
    int counted = 0;
    for (int c = 1; c < num_classes_; ++c) {
        ClassScore score{c, tp_[c], fp_[c], fn_[c], std::nullopt};
        const std::uint64_t uni = score.tp + score.fp + score.fn;
        if (uni > 0) {
            score.iou = ratio(score.tp, uni);
        } else if (strict_classes) {
            score.iou = 0.0;
        }
        if (score.iou) {
            sum += *score.iou;
            ++counted;
        }
        report.per_class.push_back(score);
    }
    report.miou = counted == 0 ? 1.0 : sum / counted;
    report.miou_loss = 1.0 - report.miou;
    return report;
}

ClassConfusion accumulate(ClassConfusion confusion, const SemanticVoxelGrid& pred,
                          const SemanticVoxelGrid& gt, const VoxelMask* invalid) {
    confusion.add(pred, gt, invalid);
    return confusion;
}

double geometric_iou(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
                     const VoxelMask* invalid) {
    check_shapes(pred, gt, invalid);
    const VoxelMask* gt_invalid = gt.invalid() ? &*gt.invalid() : nullptr;
    std::uint64_t tp = 0, uni = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        if (excluded(i, gt, invalid, gt_invalid)) {
            continue;
        }
        const bool p = pred.at(i) != kEmptyLabel;
        const bool g = gt.at(i) != kEmptyLabel;
        tp += (p && g) ? 1 : 0;
        uni += (p || g) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : ratio(tp, uni);
}

EvalReport semantic_miou(const SemanticVoxelGrid& pred, const SemanticVoxelGrid& gt,
                         const VoxelMask* invalid, int num_classes, bool strict_classes) {
    ClassConfusion confusion(num_classes);
    confusion.add(pred, gt, invalid);
    return confusion.finalize(strict_classes);
}

std::string format_report_table(const EvalReport& report, const std::string& row_name) {
    std::vector<std::string> headers = {"Method", "IoU", "mIoU"};
    std::vector<std::string> cells = {row_name};
    const auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
        return std::string(buf);
    };
    cells.push_back(pct(report.iou));
    cells.push_back(pct(report.miou));
    for (const auto& c : report.per_class) {
        const auto name = class_name(static_cast<Label>(c.id));
        headers.push_back(name.empty() ? "c" + std::to_string(c.id) : std::string(name));
        cells.push_back(c.iou ? pct(*c.iou) : "-");
    }
    std::string head, row;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        const std::size_t w = std::max(headers[i].size(), cells[i].size());
        const auto pad = [w](const std::string& s, bool left) {
            const std::string fill(w - s.size(), ' ');
            return left ? s + fill : fill + s;
        };
        const bool left = i == 0;
        head += (i ? "  " : "") + pad(headers[i], left);
        row += (i ? "  " : "") + pad(cells[i], left);
    }
    return head + "\n" + row + "\n";
}

}  // namespace voxvis

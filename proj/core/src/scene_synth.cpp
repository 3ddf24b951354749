// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/scene_synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxvis/error.hpp"
#include "voxvis/oracle.hpp"

namespace voxvis {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Stream ids; one per generation stage.
constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kLabelStream = 2;
constexpr std::uint64_t kCameraStream = 3;

// 1 / (2 tan 30°): focal length in units of image width for a 60° field of view.
constexpr double kHalfSqrt3 = 0.86602540378443864676;
constexpr double kSqrt3 = 1.7320508075688772935;

// KITTI odometry sequences 04-10 (1226 x 370) left color camera.
constexpr double kKittiFx = 718.856;
constexpr double kKittiCx = 607.1928;
constexpr double kKittiCy = 185.2157;
constexpr double kKittiCameraHeight = 1.73;

class Builder {
public:
    Builder(const SceneSpec& spec, SemanticVoxelGrid& grid)
        : spec_(spec), grid_(grid), geo_(spec.seed, kGeometryStream),
          labels_(spec.seed, kLabelStream),
          target_(static_cast<std::size_t>(std::ceil(spec.density * static_cast<double>(grid.size())))) {}

    Label next_label() {
        return static_cast<Label>(1 + labels_.below(static_cast<std::uint64_t>(spec_.num_classes - 1)));
    }

    void fill_box(int x0, int y0, int z0, int x1, int y1, int z1, Label label) {
        const GridDims& d = grid_.dims();
        for (int x = std::max(0, x0); x <= std::min(d.x - 1, x1); ++x) {
            for (int y = std::max(0, y0); y <= std::min(d.y - 1, y1); ++y) {
                for (int z = std::max(0, z0); z <= std::min(d.z - 1, z1); ++z) {
                    const std::size_t i = d.linear({x, y, z});
                    if (grid_.at(i) == kEmptyLabel) {
                        ++occupied_;
                    }
                    grid_.set(i, label);
                }
            }
        }
    }

    [[nodiscard]] bool reached() const { return occupied_ >= target_; }
    [[nodiscard]] std::size_t attempts_cap() const {
        return 64 + 8 * static_cast<std::size_t>(grid_.dims().x) * grid_.dims().y;
    }
    CounterRng& geo() { return geo_; }

private:
    const SceneSpec& spec_;
    SemanticVoxelGrid& grid_;
    CounterRng geo_;
    CounterRng labels_;
    std::size_t target_;
    std::size_t occupied_ = 0;
};

void build_random(const SceneSpec& spec, SemanticVoxelGrid& grid) {
    CounterRng geo(spec.seed, kGeometryStream);
    CounterRng labels(spec.seed, kLabelStream);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (geo.uniform() < spec.density) {
            grid.set(i, static_cast<Label>(
                            1 + labels.below(static_cast<std::uint64_t>(spec.num_classes - 1))));
        }
    }
}

void build_ground_boxes(Builder& b, const GridDims& d) {
    b.fill_box(0, 0, 0, d.x - 1, d.y - 1, 0, b.next_label());
    auto& rng = b.geo();
    for (std::size_t n = 0; !b.reached() && n < b.attempts_cap(); ++n) {
        const int sx = rng.range(2, std::max(2, std::min(5, d.x)));
        const int sy = rng.range(2, std::max(2, std::min(5, d.y)));
        const int h = rng.range(1, std::max(1, std::min(6, d.z - 1)));
        const int x0 = rng.range(0, std::max(0, d.x - sx));
        const int y0 = rng.range(0, std::max(0, d.y - sy));
        b.fill_box(x0, y0, 1, x0 + sx - 1, y0 + sy - 1, h, b.next_label());
    }
}

void build_wall(Builder& b, const GridDims& d) {
    auto& rng = b.geo();
    const int wall_x = d.x - 1 - static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, d.x / 4))));
    b.fill_box(wall_x, 0, 0, wall_x, d.y - 1, d.z - 1, b.next_label());
    if (wall_x < 1) {
        return;
    }
    for (std::size_t n = 0; !b.reached() && n < b.attempts_cap(); ++n) {
        const int sx = rng.range(1, std::min(4, wall_x));
        const int sy = rng.range(2, std::max(2, std::min(4, d.y)));
        const int sz = rng.range(2, std::max(2, std::min(4, d.z)));
        const int x0 = rng.range(0, wall_x - sx);
        const int y0 = rng.range(0, std::max(0, d.y - sy));
        const int z0 = rng.range(0, std::max(0, d.z - sz));
        b.fill_box(x0, y0, z0, x0 + sx - 1, y0 + sy - 1, z0 + sz - 1, b.next_label());
    }
}

void build_corridor(Builder& b, const GridDims& d) {
    b.fill_box(0, 0, 0, d.x - 1, d.y - 1, 0, b.next_label());
    const Label wall = b.next_label();
    b.fill_box(0, 0, 1, d.x - 1, 0, d.z - 1, wall);
    b.fill_box(0, d.y - 1, 1, d.x - 1, d.y - 1, d.z - 1, wall);
    auto& rng = b.geo();
    for (std::size_t n = 0; !b.reached() && n < b.attempts_cap(); ++n) {
        const int x = rng.range(0, d.x - 1);
        const int y = rng.range(std::min(2, d.y - 1), std::max(0, d.y - 3));
        const int h = rng.range(std::max(1, d.z / 2), std::max(1, d.z - 1));
        b.fill_box(x, y, 1, x, y, h, b.next_label());
    }
}

Eigen::Vector3d random_unit(CounterRng& rng) {
    for (;;) {
        const Eigen::Vector3d v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const double n2 = v.squaredNorm();
        if (n2 > 1e-6 && n2 <= 1.0) {
            return v / std::sqrt(n2);
        }
    }
}

CameraRig place_camera(const SceneSpec& spec) {
    CameraRig rig;
    rig.grid.dims = spec.dims;
    rig.grid.voxel_size = spec.voxel_size;
    const Eigen::Vector3d extent =
        spec.voxel_size * Eigen::Vector3d(spec.dims.x, spec.dims.y, spec.dims.z);
    const Eigen::Vector3d grid_center = 0.5 * extent;

    const double w = spec.image_width;
    const double h = spec.image_height;
    rig.intrinsics = {kHalfSqrt3 * w, kHalfSqrt3 * w, 0.5 * w, 0.5 * h, spec.image_width,
                      spec.image_height};

    CounterRng rng(spec.seed, kCameraStream);
    const auto jitter = [&](double scale) {
        return Eigen::Vector3d(rng.uniform(-scale, scale) * extent.x(),
                               rng.uniform(-scale, scale) * extent.y(),
                               rng.uniform(-scale, scale) * extent.z());
    };

    switch (spec.camera) {
    case CameraPlacement::Front: {
        const double back = 0.5 * std::max(extent.y(), extent.z()) * kSqrt3 * rng.uniform(0.35, 0.8);
        const Eigen::Vector3d center(-back, grid_center.y() + rng.uniform(-0.1, 0.1) * extent.y(),
                                     rng.uniform(0.3, 0.9) * extent.z());
        rig.extrinsics = look_at(center, grid_center + jitter(0.1));
        break;
    }
    case CameraPlacement::Orbit: {
        Eigen::Vector3d dir;
        do {
            dir = random_unit(rng);
        } while (dir.z() < 0.15 || dir.z() > 0.85);
        const double radius = 0.5 * extent.norm() * rng.uniform(1.3, 2.2);
        rig.extrinsics = look_at(grid_center + radius * dir, grid_center + jitter(0.1));
        break;
    }
    case CameraPlacement::Fuzz: {
        const Eigen::Vector3d center(rng.uniform(-0.5, 1.5) * extent.x(),
                                     rng.uniform(-0.5, 1.5) * extent.y(),
                                     rng.uniform(-0.5, 1.5) * extent.z());
        Eigen::Vector3d target(rng.uniform() * extent.x(), rng.uniform() * extent.y(),
                               rng.uniform() * extent.z());
        if ((target - center).norm() < 1e-6) {
            target += Eigen::Vector3d(spec.voxel_size, 0, 0);
        }
        rig.extrinsics = look_at(center, target, random_unit(rng));
        break;
    }
    case CameraPlacement::Kitti: {
        rig.intrinsics = {kKittiFx * w / 1226.0, kKittiFx * w / 1226.0, kKittiCx * w / 1226.0,
                          kKittiCy * h / 370.0, spec.image_width, spec.image_height};
        const Eigen::Vector3d center(-0.27, grid_center.y(),
                                     spec.voxel_size + kKittiCameraHeight);
        rig.extrinsics = look_at(center, center + Eigen::Vector3d::UnitX());
        break;
    }
    }
    return rig;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::next() noexcept { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
    __extension__ using U128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<U128>(next()) * n) >> 64);
}

SynthScene generate(const SceneSpec& spec) {
    if (!(spec.density >= 0.0 && spec.density <= 1.0)) {
        throw ParameterError("density must lie in [0, 1]");
    }
    spec.dims.validate();
    if (!(spec.voxel_size > 0.0) || spec.image_width <= 0 || spec.image_height <= 0) {
        throw ParameterError("voxel size and image size must be positive");
    }
    if (spec.num_classes < 2 || spec.num_classes > kInvalidLabel) {
        throw ParameterError("num_classes must be in [2, 255]");
    }

    CameraRig rig = place_camera(spec);
    SemanticVoxelGrid grid(rig.grid);
    if (spec.density > 0.0) {
        Builder b(spec, grid);
        switch (spec.motif) {
        case Motif::Random:
            build_random(spec, grid);
            break;
        case Motif::GroundBoxes:
            build_ground_boxes(b, spec.dims);
            break;
        case Motif::Wall:
            build_wall(b, spec.dims);
            break;
        case Motif::Corridor:
            build_corridor(b, spec.dims);
            break;
        }
    }
    return {std::move(grid), rig};
}

Motif parse_motif(std::string_view name) {
    if (name == "random") return Motif::Random;
    if (name == "wall") return Motif::Wall;
    if (name == "corridor") return Motif::Corridor;
    if (name == "ground-plane-plus-boxes" || name == "ground-boxes") return Motif::GroundBoxes;
    throw ParameterError("unknown motif '" + std::string(name) +
                         "' (random|wall|corridor|ground-plane-plus-boxes)");
}

std::string_view to_string(Motif motif) noexcept {
    switch (motif) {
    case Motif::Random: return "random";
    case Motif::Wall: return "wall";
    case Motif::Corridor: return "corridor";
    case Motif::GroundBoxes: return "ground-plane-plus-boxes";
    }
    return "random";
}

CameraPlacement parse_camera_placement(std::string_view name) {
    if (name == "front") return CameraPlacement::Front;
    if (name == "orbit") return CameraPlacement::Orbit;
    if (name == "fuzz") return CameraPlacement::Fuzz;
    if (name == "kitti") return CameraPlacement::Kitti;
    throw ParameterError("unknown camera placement '" + std::string(name) +
                         "' (front|orbit|fuzz|kitti)");
}

std::string_view to_string(CameraPlacement placement) noexcept {
    switch (placement) {
    case CameraPlacement::Front: return "front";
    case CameraPlacement::Orbit: return "orbit";
    case CameraPlacement::Fuzz: return "fuzz";
    case CameraPlacement::Kitti: return "kitti";
    }
    return "front";
}

DepthMap render_reference_depth(const SemanticVoxelGrid& grid, const CameraRig& rig,
                                bool allow_large) {
    if (!(grid.dims() == rig.grid.dims)) {
        throw ShapeError("label grid dimensions differ from calibration dims");
    }
    if (grid.size() > kOracleVoxelLimit && !allow_large) {
        throw GuardError("grid too large for reference rendering without the override");
    }
    rig.validate();
    DepthMap out(rig.intrinsics.width, rig.intrinsics.height);
    for (int v = 0; v < out.height; ++v) {
        for (int u = 0; u < out.width; ++u) {
            const Ray ray = pixel_ray(rig, u + 0.5, v + 0.5);
            const auto hit = first_hit(grid, rig.grid, ray);
            if (!hit) {
                continue;
            }
            const double z = hit->distance * (rig.extrinsics.rotation * ray.direction).z();
            out.at(u, v) = z > 0.0 ? static_cast<float>(z) : 0.0f;
        }
    }
    return out;
}

}  // namespace voxvis

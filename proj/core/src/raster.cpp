// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/raster.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>

#include "voxvis/error.hpp"
#include "voxvis/parallel.hpp"

namespace voxvis {
namespace {

// Depth-buffer cell: (quantized depth << 32) | voxel index. Unsigned order on
// the key is (depth bucket, index) lexicographic order, so an atomic min is
// order-independent and the lower index wins ties.
using DepthKey = std::uint64_t;
constexpr DepthKey kEmptyKey = std::numeric_limits<DepthKey>::max();
constexpr std::uint64_t kMaxBucket = 0xFFFFFFFEull;

DepthKey make_key(double depth, std::uint32_t voxel) noexcept {
    const double bucket = std::nearbyint(depth / kDepthTieEpsilon);
    const auto q = bucket >= static_cast<double>(kMaxBucket) ? kMaxBucket
                   : bucket <= 0.0                            ? 0ull
                                                              : static_cast<std::uint64_t>(bucket);
    return (q << 32) | voxel;
}

double key_depth(DepthKey key) noexcept {
    return static_cast<double>(key >> 32) * kDepthTieEpsilon;
}

std::uint32_t key_owner(DepthKey key) noexcept {
    return static_cast<std::uint32_t>(key & 0xFFFFFFFFull);
}

void lower_to_min(std::atomic<DepthKey>& slot, DepthKey key) noexcept {
    DepthKey cur = slot.load(std::memory_order_relaxed);
    while (key < cur && !slot.compare_exchange_weak(cur, key, std::memory_order_relaxed)) {
    }
}

// Precomputed edge functions and triangle planes of one projected face.
struct FaceSetup {
    std::array<double, 4> px{}, py{}, pz{};
    // Edge i: f(x, y) = a x + b y + c = (p[i+1] - p[i]) × ((x, y) - p[i])
    std::array<double, 4> ea{}, eb{}, ec{};
    // Diagonal 0 -> 2 and the side vertex 1 lies on.
    double da = 0, db = 0, dc = 0, side = 0;
    // z = z0 + ga (x - x0) + gb (y - y0) for triangles (0,1,2) and (0,2,3).
    std::array<double, 2> ga{}, gb{};
    std::array<bool, 2> tri_ok{};
    double area = 0;
    bool degenerate = false;

    FaceSetup() = default;
    explicit FaceSetup(const std::array<const PixelProjection*, 4>& v) noexcept {
        for (int i = 0; i < 4; ++i) {
            px[i] = v[i]->u_exact;
            py[i] = v[i]->v_exact;
            pz[i] = v[i]->depth;
        }
        double twice_area = 0;
        for (int i = 0; i < 4; ++i) {
            const int j = (i + 1) & 3;
            const double ex = px[j] - px[i];
            const double ey = py[j] - py[i];
            ea[i] = -ey;
            eb[i] = ex;
            ec[i] = ey * px[i] - ex * py[i];
            twice_area += px[i] * py[j] - px[j] * py[i];
        }
        area = 0.5 * twice_area;
        degenerate = !(std::abs(area) >= kDegenerateArea);

        da = -(py[2] - py[0]);
        db = px[2] - px[0];
        dc = (py[2] - py[0]) * px[0] - (px[2] - px[0]) * py[0];
        side = da * px[1] + db * py[1] + dc;

        const std::array<std::array<int, 3>, 2> tris = {{{0, 1, 2}, {0, 2, 3}}};
        for (int t = 0; t < 2; ++t) {
            const auto [i0, i1, i2] = tris[t];
            const double x1 = px[i1] - px[i0], y1 = py[i1] - py[i0], z1 = pz[i1] - pz[i0];
            const double x2 = px[i2] - px[i0], y2 = py[i2] - py[i0], z2 = pz[i2] - pz[i0];
            const double denom = x1 * y2 - x2 * y1;
            tri_ok[t] = std::abs(0.5 * denom) >= kDegenerateArea;
            if (tri_ok[t]) {
                ga[t] = (z1 * y2 - z2 * y1) / denom;
                gb[t] = (x1 * z2 - x2 * z1) / denom;
            }
        }
    }

    [[nodiscard]] bool contains(double x, double y) const noexcept {
        if (degenerate) {
            return false;
        }
        bool all_nonneg = true;
        bool all_nonpos = true;
        for (int i = 0; i < 4; ++i) {
            const double f = ea[i] * x + eb[i] * y + ec[i];
            all_nonneg = all_nonneg && f >= 0.0;
            all_nonpos = all_nonpos && f <= 0.0;
        }
        return all_nonneg || all_nonpos;
    }

    [[nodiscard]] double depth(double x, double y, bool& fallback) const noexcept {
        const double d = da * x + db * y + dc;
        // Same side of the diagonal as vertex 1 (or on it) -> triangle (0,1,2).
        const int t = side != 0.0 && d * side >= 0.0 ? 0 : 1;
        if (tri_ok[t]) {
            return pz[0] + ga[t] * (x - px[0]) + gb[t] * (y - py[0]);
        }
        fallback = true;
        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 4; ++i) {
            const double dist = (px[i] - x) * (px[i] - x) + (py[i] - y) * (py[i] - y);
            if (dist < best) {
                best = dist;
                nearest = i;
            }
        }
        return pz[nearest];
    }
};

FaceSetup setup_face(const FaceQuad& quad) noexcept {
    return FaceSetup({&quad.vertices[0], &quad.vertices[1], &quad.vertices[2],
                      &quad.vertices[3]});
}

FaceSetup setup_face(const VoxelProjection& vp, int face) noexcept {
    const auto& c = kFaceCorners[face];
    return FaceSetup(
        {&vp.corners[c[0]], &vp.corners[c[1]], &vp.corners[c[2]], &vp.corners[c[3]]});
}

template <typename Fn>
void for_each_sample(int lo, int hi, int stride, Fn&& fn) {
    int x = lo;
    for (; x <= hi; x += stride) {
        fn(x);
    }
    if (x - stride != hi) {
        fn(hi);
    }
}

struct LocalStats {
    std::uint64_t clipped = 0;
    std::uint64_t off_screen = 0;
    std::uint64_t degenerate_faces = 0;
    std::uint64_t depth_fallbacks = 0;
};

// One voxel ready to sample: projected faces, the live (non-degenerate) ones
// and its AABB.
struct VoxelSetup {
    VoxelProjection vp;
    PixelRect rect;
    std::array<FaceSetup, 6> faces;
    std::array<std::uint8_t, 6> live{};
    int num_live = 0;
    // Bounds of the sub-pixel corners, for a cheap reject before face tests.
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;

    // Smallest depth over live faces containing (x, y), +inf if none does.
    [[nodiscard]] double depth_at(double x, double y, LocalStats& local) const noexcept {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < num_live; ++k) {
            const FaceSetup& f = faces[live[k]];
            if (f.contains(x, y)) {
                bool fallback = false;
                best = std::min(best, f.depth(x, y, fallback));
                local.depth_fallbacks += fallback ? 1 : 0;
            }
        }
        return best;
    }
    [[nodiscard]] bool may_cover(double x, double y) const noexcept {
        return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi;
    }
};

// nullopt if the voxel is clipped or off screen; counts either case.
std::optional<VoxelSetup> prepare_voxel(std::uint32_t voxel, const CameraRig& rig,
                                        const RasterOptions& options, LocalStats* local) {
    VoxelSetup s;
    s.vp = project_voxel(rig.grid.dims.unflatten(voxel), rig, options.z_min);
    if (s.vp.clipped) {
        if (local != nullptr) {
            ++local->clipped;
        }
        return std::nullopt;
    }
    s.rect = voxel_aabb(s.vp.corners, rig.intrinsics.width, rig.intrinsics.height, options.z_min);
    if (s.rect.empty()) {
        if (local != nullptr) {
            ++local->off_screen;
        }
        return std::nullopt;
    }
    s.x_lo = s.y_lo = std::numeric_limits<double>::infinity();
    s.x_hi = s.y_hi = -std::numeric_limits<double>::infinity();
    for (const auto& c : s.vp.corners) {
        s.x_lo = std::min(s.x_lo, c.u_exact);
        s.x_hi = std::max(s.x_hi, c.u_exact);
        s.y_lo = std::min(s.y_lo, c.v_exact);
        s.y_hi = std::max(s.y_hi, c.v_exact);
    }
    for (int f = 0; f < 6; ++f) {
        s.faces[f] = setup_face(s.vp, f);
        if (!s.faces[f].degenerate) {
            s.live[s.num_live++] = static_cast<std::uint8_t>(f);
        }
    }
    return s;
}

// Every depth sample a voxel offers: degenerate-face corner stamps first, then
// the stride lattice over its AABB (v outer).
template <typename Fn>
void walk_voxel(const VoxelSetup& s, int stride, LocalStats& local, Fn&& emit) {
    for (int f = 0; f < 6; ++f) {
        if (!s.faces[f].degenerate) {
            continue;
        }
        // Edge-on face: keep its silhouette by stamping the corner pixels.
        ++local.degenerate_faces;
        for (const int c : kFaceCorners[f]) {
            const PixelProjection& p = s.vp.corners[c];
            if (p.in_bounds) {
                emit(p.u, p.v, p.depth);
            }
        }
    }
    if (s.num_live == 0) {
        return;
    }
    for_each_sample(s.rect.v_min, s.rect.v_max, stride, [&](int v) {
        for_each_sample(s.rect.u_min, s.rect.u_max, stride, [&](int u) {
            const double best = s.depth_at(u + 0.5, v + 0.5, local);
            if (best < std::numeric_limits<double>::infinity()) {
                emit(u, v, best);
            }
        });
    });
}

}  // namespace

PixelRect voxel_aabb(std::span<const PixelProjection> corners, int width, int height,
                     double z_min) {
    PixelRect r{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
    bool any = false;
    for (const auto& c : corners) {
        if (!(c.depth > z_min)) {
            continue;
        }
        any = true;
        r.u_min = std::min(r.u_min, c.u);
        r.v_min = std::min(r.v_min, c.v);
        r.u_max = std::max(r.u_max, c.u);
        r.v_max = std::max(r.v_max, c.v);
    }
    if (!any || r.u_max < 0 || r.v_max < 0 || r.u_min >= width || r.v_min >= height) {
        return PixelRect{};
    }
    r.u_min = std::max(r.u_min, 0);
    r.v_min = std::max(r.v_min, 0);
    r.u_max = std::min(r.u_max, width - 1);
    r.v_max = std::min(r.v_max, height - 1);
    return r;
}

std::vector<int> sample_axis(int min, int max, int stride) {
    if (stride < 1) {
        throw ParameterError("sampling stride must be >= 1, got " + std::to_string(stride));
    }
    std::vector<int> out;
    if (min > max) {
        return out;
    }
    for_each_sample(min, max, stride, [&](int x) { out.push_back(x); });
    return out;
}

std::vector<PixelCoord> sample_pixels(const PixelRect& rect, int stride) {
    const auto us = sample_axis(rect.u_min, rect.u_max, stride);
    const auto vs = sample_axis(rect.v_min, rect.v_max, stride);
    std::vector<PixelCoord> out;
    out.reserve(us.size() * vs.size());
    for (const int v : vs) {
        for (const int u : us) {
            out.push_back({u, v});
        }
    }
    return out;
}

std::array<FaceQuad, 6> voxel_faces(const VoxelProjection& projection) {
    std::array<FaceQuad, 6> faces;
    for (int f = 0; f < 6; ++f) {
        for (int k = 0; k < 4; ++k) {
            faces[f].vertices[k] = projection.corners[kFaceCorners[f][k]];
        }
    }
    return faces;
}

double quad_area(const FaceQuad& quad) noexcept { return setup_face(quad).area; }

bool point_in_quad(const Eigen::Vector2d& p, const FaceQuad& quad) noexcept {
    return setup_face(quad).contains(p.x(), p.y());
}

double interpolate_depth(const Eigen::Vector2d& p, const FaceQuad& quad,
                         bool* used_fallback) noexcept {
    bool fallback = false;
    const double z = setup_face(quad).depth(p.x(), p.y(), fallback);
    if (used_fallback != nullptr) {
        *used_fallback = fallback;
    }
    return z;
}

VisibilityResult rasterize_visibility(const SemanticVoxelGrid& grid, const CameraRig& rig,
                                      const RasterOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    if (options.stride < 1) {
        throw ParameterError("sampling stride must be >= 1, got " +
                             std::to_string(options.stride));
    }
    if (!(grid.dims() == rig.grid.dims)) {
        throw ShapeError("label grid dimensions differ from calibration dims");
    }
    rig.validate();

    const OccupiedSet occupied = extract_occupied(grid);
    const int width = rig.intrinsics.width;
    const int height = rig.intrinsics.height;
    const std::size_t num_pixels = static_cast<std::size_t>(width) * height;
    const int stride = options.stride;

    // Depth competes on stride x stride blocks of the image (pixels when the
    // stride is 1). Lattices are anchored per voxel and rarely land on the
    // pixels an occluder sampled, so a per-pixel buffer under a sparse lattice
    // lets hidden voxels win pixels the occluder never tested. A lattice steps
    // at most one block at a time, so every voxel samples every block its AABB
    // touches.
    const int blocks_x = (width + stride - 1) / stride;
    const int blocks_y = (height + stride - 1) / stride;
    const std::size_t num_blocks = static_cast<std::size_t>(blocks_x) * blocks_y;
    const auto block_of = [&](int u, int v) {
        return static_cast<std::size_t>(v / stride) * blocks_x + static_cast<std::size_t>(u / stride);
    };
    std::vector<std::atomic<DepthKey>> blocks(num_blocks);
    for (auto& slot : blocks) {
        slot.store(kEmptyKey, std::memory_order_relaxed);
    }

    std::atomic<std::uint64_t> clipped{0}, off_screen{0}, degenerate{0}, fallbacks{0};
    parallel_chunks(occupied.size(), 512, options.threads, [&](std::size_t begin, std::size_t end) {
        LocalStats local;
        for (std::size_t i = begin; i < end; ++i) {
            const std::uint32_t voxel = occupied.indices[i];
            if (const auto s = prepare_voxel(voxel, rig, options, &local)) {
                walk_voxel(*s, stride, local, [&](int u, int v, double depth) {
                    lower_to_min(blocks[block_of(u, v)], make_key(depth, voxel));
                });
            }
        }
        clipped.fetch_add(local.clipped, std::memory_order_relaxed);
        off_screen.fetch_add(local.off_screen, std::memory_order_relaxed);
        degenerate.fetch_add(local.degenerate_faces, std::memory_order_relaxed);
        fallbacks.fetch_add(local.depth_fallbacks, std::memory_order_relaxed);
    });

    VisibilityResult result;
    result.mask = VoxelMask(grid.dims());
    result.depth.width = width;
    result.depth.height = height;
    result.depth.min_depth.assign(num_pixels, std::numeric_limits<double>::infinity());
    result.depth.owner.assign(num_pixels, DepthBuffer::kNoOwner);
    std::uint64_t written = 0;
    const auto claim = [&](DepthKey key) {
        const std::uint32_t owner = key_owner(key);
        if (owner >= grid.size() || grid.at(owner) == kEmptyLabel) {
            throw InvariantError("depth buffer owner " + std::to_string(owner) +
                                 " is not an occupied voxel");
        }
        result.mask.set(owner);
        ++written;
        return owner;
    };

    if (stride == 1) {
        for (std::size_t p = 0; p < num_pixels; ++p) {
            const DepthKey key = blocks[p].load(std::memory_order_relaxed);
            if (key != kEmptyKey) {
                result.depth.owner[p] = claim(key);
                result.depth.min_depth[p] = key_depth(key);
            }
        }
    } else {
        // Each won block is recorded at the winner's first sample (in its walk
        // order) that produced the winning key.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> won;  // (owner, block)
        for (std::size_t b = 0; b < num_blocks; ++b) {
            const DepthKey key = blocks[b].load(std::memory_order_relaxed);
            if (key != kEmptyKey) {
                won.emplace_back(claim(key), static_cast<std::uint32_t>(b));
            }
        }
        std::sort(won.begin(), won.end());
        std::vector<std::size_t> group_start;
        for (std::size_t k = 0; k < won.size(); ++k) {
            if (k == 0 || won[k].first != won[k - 1].first) {
                group_start.push_back(k);
            }
        }
        group_start.push_back(won.size());
        std::vector<std::uint8_t> resolved(num_blocks, 0);
        parallel_chunks(group_start.size() - 1, 64, options.threads,
                        [&](std::size_t begin, std::size_t end) {
            LocalStats scratch;
            for (std::size_t g = begin; g < end; ++g) {
                const std::uint32_t voxel = won[group_start[g]].first;
                const auto s = prepare_voxel(voxel, rig, options, nullptr);
                walk_voxel(*s, stride, scratch, [&](int u, int v, double depth) {
                    const std::size_t b = block_of(u, v);
                    const DepthKey key = make_key(depth, voxel);
                    if (resolved[b] == 0 && blocks[b].load(std::memory_order_relaxed) == key) {
                        resolved[b] = 1;
                        const std::size_t p = result.depth.pixel(u, v);
                        result.depth.owner[p] = voxel;
                        result.depth.min_depth[p] = key_depth(key);
                    }
                });
            }
        });
    }

    auto& st = result.stats;
    st.occupied = occupied.size();
    st.clipped = clipped.load();
    st.off_screen = off_screen.load();
    st.degenerate_faces = degenerate.load();
    st.depth_fallbacks = fallbacks.load();
    st.pixels_written = written;
    st.visible = result.mask.count();
    st.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                     .count();
    return result;
}

VisibleLabels extract_visible_labels(const SemanticVoxelGrid& grid, const CameraRig& rig,
                                     const RasterOptions& options) {
    VisibilityResult vis = rasterize_visibility(grid, rig, options);
    VisibleLabels out{apply_mask(grid, vis.mask), std::move(vis.mask), vis.stats};
    return out;
}

std::optional<double> voxel_depth_at(const Index3& voxel, const PixelCoord& pixel,
                                     const CameraRig& rig, double z_min) {
    const VoxelProjection vp = project_voxel(voxel, rig, z_min);
    if (vp.clipped) {
        return std::nullopt;
    }
    const Eigen::Vector2d center(pixel.u + 0.5, pixel.v + 0.5);
    std::optional<double> best;
    const auto offer = [&](double d) { best = best ? std::min(*best, d) : d; };
    for (const FaceQuad& face : voxel_faces(vp)) {
        if (std::abs(quad_area(face)) < kDegenerateArea) {
            for (const auto& p : face.vertices) {
                if (p.in_bounds && p.u == pixel.u && p.v == pixel.v) {
                    offer(p.depth);
                }
            }
        } else if (point_in_quad(center, face)) {
            offer(interpolate_depth(center, face));
        }
    }
    return best;
}

}  // namespace voxvis

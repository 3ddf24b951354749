// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run. Prints one PASS/FAIL line per criterion, preceded by
// "# " detail lines. Exit status is nonzero when any criterion fails that
// is not listed in --known-fail.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <Eigen/Geometry>

#include "../fixtures/confusion_fixtures.hpp"
#include "voxvis/calibration.hpp"
#include "voxvis/depth_occupancy.hpp"
#include "voxvis/grid_io.hpp"
#include "voxvis/metrics.hpp"
#include "voxvis/oracle.hpp"
#include "voxvis/parallel.hpp"
#include "voxvis/raster.hpp"
#include "voxvis/scene_synth.hpp"

namespace {

using namespace voxvis;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
    std::fputs("# ", stdout);
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::fputc('\n', stdout);
    std::fflush(stdout);
}

struct Verdict {
    int id;
    std::string name;
    bool pass;
    std::string summary;
};

std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

struct Distribution {
    std::vector<double> values;

    void add(double v) { values.push_back(v); }
    [[nodiscard]] double quantile(double q) const {
        if (values.empty()) {
            return NAN;
        }
        std::vector<double> s = values;
        std::sort(s.begin(), s.end());
        const double pos = q * static_cast<double>(s.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, s.size() - 1);
        return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
    }
    [[nodiscard]] double median() const { return quantile(0.5); }
    [[nodiscard]] std::size_t at_least(double t) const {
        return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v >= t; }));
    }
    [[nodiscard]] std::string describe() const {
        return format("n=%zu min=%.4f p5=%.4f p25=%.4f median=%.4f p75=%.4f max=%.4f", values.size(),
                      quantile(0.0), quantile(0.05), quantile(0.25), median(), quantile(0.75), quantile(1.0));
    }
    [[nodiscard]] std::string histogram() const {
        static constexpr double kEdges[] = {0.0, 0.5, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99, 1.0};
        std::string out;
        for (std::size_t b = 0; b + 1 < std::size(kEdges); ++b) {
            const bool last = b + 2 == std::size(kEdges);
            const auto n = std::count_if(values.begin(), values.end(), [&](double v) {
                return v >= kEdges[b] && (v < kEdges[b + 1] || (last && v == kEdges[b + 1]));
            });
            out += format("[%.2f,%.2f%c:%ld ", kEdges[b], kEdges[b + 1], last ? ']' : ')', static_cast<long>(n));
        }
        const auto exact = std::count(values.begin(), values.end(), 1.0);
        out += format("=1.00:%ld", static_cast<long>(exact));
        return out;
    }
};

// Shared across criteria so every rasterization feeds the subset check.
struct SubsetTally {
    std::uint64_t runs = 0;
    std::uint64_t violations = 0;
    std::set<std::string> families;
} g_subset;

VisibilityResult raster(const SynthScene& s, int stride, int threads, const std::string& family) {
    VisibilityResult r = rasterize_visibility(s.grid, s.rig, {stride, threads});
    ++g_subset.runs;
    g_subset.families.insert(family);
    if (!r.mask.is_subset_of(occupied_mask(s.grid))) {
        ++g_subset.violations;
    }
    return r;
}

SceneSpec oracle_family(std::uint64_t i) {
    SceneSpec spec;
    spec.seed = 1000 + i;
    spec.dims = {16, 16, 16};
    spec.density = std::array{0.05, 0.2, 0.5}[i % 3];
    spec.image_width = spec.image_height = 64;
    spec.motif = Motif::Random;
    spec.camera = (i / 3) % 2 == 0 ? CameraPlacement::Front : CameraPlacement::Orbit;
    return spec;
}

constexpr std::array kMotifs = {Motif::Random, Motif::Wall, Motif::Corridor, Motif::GroundBoxes};
constexpr std::array kCameras = {CameraPlacement::Front, CameraPlacement::Orbit, CameraPlacement::Fuzz,
                                 CameraPlacement::Kitti};

SceneSpec mixed_family(std::uint64_t i, std::uint64_t base) {
    SceneSpec spec;
    spec.seed = base + i;
    spec.dims = {16, 16, 16};
    spec.density = std::array{0.05, 0.2, 0.5}[i % 3];
    spec.motif = kMotifs[i % 4];
    spec.camera = kCameras[(i / 4) % 4];
    spec.image_width = spec.image_height = 64;
    return spec;
}

// 1 ------------------------------------------------------------------------
Verdict oracle_agreement() {
    constexpr int kScenes = 200;
    Distribution iou, iou_single_ray;
    std::size_t exact_single_ray = 0;
    const auto t0 = Clock::now();
    double oracle_s = 0;
    for (int i = 0; i < kScenes; ++i) {
        const auto s = generate(oracle_family(static_cast<std::uint64_t>(i)));
        const auto r = raster(s, 1, 1, "oracle");
        const auto to = Clock::now();
        const auto oracle = cast_visibility(s.grid, s.rig, {2, false, 1});
        oracle_s += seconds_since(to);
        iou.add(compare_masks(r.mask, oracle).iou);
        const auto single = cast_visibility(s.grid, s.rig, {1, false, 1});
        const auto agree = compare_masks(r.mask, single);
        iou_single_ray.add(agree.iou);
        exact_single_ray += agree.only_a + agree.only_b == 0;
    }
    const double elapsed = seconds_since(t0);
    note("[1] IoU(VRLE d=1, oracle s=2): %s", iou.describe().c_str());
    note("[1] histogram: %s", iou.histogram().c_str());
    for (double density : {0.05, 0.2, 0.5}) {
        Distribution d;
        for (int i = 0; i < kScenes; ++i) {
            if (oracle_family(static_cast<std::uint64_t>(i)).density == density) {
                d.add(iou.values[static_cast<std::size_t>(i)]);
            }
        }
        note("[1] density %.2f: median %.4f, >=0.95 in %zu/%zu", density, d.median(), d.at_least(0.95),
             d.values.size());
    }
    note("[1] IoU(VRLE d=1, oracle s=1): %s; bit-identical in %zu/%d scenes", iou_single_ray.describe().c_str(),
         exact_single_ray, kScenes);
    note("[1] wall time %.2f s (oracle s=2 share %.2f s)", elapsed, oracle_s);
    const std::size_t good = iou.at_least(0.95);
    const bool pass = good * 100 >= 95 * kScenes && elapsed < 60.0;
    return {1, "oracle agreement", pass,
            format("%zu/%d scenes at IoU >= 0.95 (need >= 95%%), median %.4f, %.1f s", good, kScenes,
                   iou.median(), elapsed)};
}

// 2 ------------------------------------------------------------------------
Verdict subset_invariant() {
    // Dedicated sweep over every motif and camera rule, fuzzed cameras included.
    for (std::uint64_t i = 0; i < 320; ++i) {
        const auto spec = mixed_family(i, 20000);
        const auto s = generate(spec);
        for (int stride : {1, 2, 4}) {
            (void)raster(s, stride, 1, std::string(to_string(spec.camera)));
        }
    }
    std::string families;
    for (const auto& f : g_subset.families) {
        families += (families.empty() ? "" : ",") + f;
    }
    note("[2] families: %s", families.c_str());
    return {2, "subset invariant", g_subset.violations == 0,
            format("%llu violations over %llu rasterizations", static_cast<unsigned long long>(g_subset.violations),
                   static_cast<unsigned long long>(g_subset.runs))};
}

// 3 ------------------------------------------------------------------------
Verdict determinism() {
    int mismatches = 0, comparisons = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto s = generate(mixed_family(i, 30000));
        for (int stride : {1, 4}) {
            const auto ref = raster(s, stride, 1, "determinism");
            for (int threads : {2, 8}) {
                const auto r = raster(s, stride, threads, "determinism");
                ++comparisons;
                if (!(r.mask == ref.mask) || !(r.depth == ref.depth)) {
                    ++mismatches;
                }
            }
        }
    }
    return {3, "determinism", mismatches == 0,
            format("%d mismatches in %d comparisons (threads 1 vs 2, 8; strides 1, 4)", mismatches, comparisons)};
}

// 4 ------------------------------------------------------------------------
Verdict depth_fidelity() {
    std::uint64_t visible = 0, violations = 0;
    double worst = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto s = generate(mixed_family(i, 40000));
        for (int stride : {1, 4}) {
            const auto r = raster(s, stride, 1, "fidelity");
            VoxelMask witnessed(s.grid.dims());
            for (int v = 0; v < r.depth.height; ++v) {
                for (int u = 0; u < r.depth.width; ++u) {
                    const auto p = r.depth.pixel(u, v);
                    const auto o = r.depth.owner[p];
                    if (o == DepthBuffer::kNoOwner) {
                        continue;
                    }
                    const auto d = voxel_depth_at(s.grid.dims().unflatten(o), {u, v}, s.rig);
                    if (!d) {
                        continue;
                    }
                    const double err = std::abs(*d - r.depth.min_depth[p]);
                    if (err <= 1e-6) {
                        witnessed.set(std::size_t{o});
                        worst = std::max(worst, err);
                    }
                }
            }
            visible += r.mask.count();
            violations += mask_difference(r.mask, witnessed).count();
        }
    }
    note("[4] largest accepted |buffer - reference| = %.3g m", worst);
    return {4, "depth-buffer fidelity", violations == 0,
            format("%llu/%llu visible voxels without an owned pixel at their depth (1e-6)",
                   static_cast<unsigned long long>(violations), static_cast<unsigned long long>(visible))};
}

// 5 ------------------------------------------------------------------------
Verdict stride_sensitivity() {
    constexpr int kScenes = 200;
    std::map<Motif, Distribution> by_motif;
    Distribution box_wall;
    int vis1_ge_vis4 = 0;
    for (int i = 0; i < kScenes; ++i) {
        auto spec = oracle_family(static_cast<std::uint64_t>(i));
        spec.seed = 50000 + static_cast<std::uint64_t>(i);
        spec.motif = kMotifs[static_cast<std::size_t>(i / 3) % 4];
        const auto s = generate(spec);
        const auto r1 = raster(s, 1, 1, "stride");
        const auto r4 = raster(s, 4, 1, "stride");
        const double iou = compare_masks(r4.mask, r1.mask).iou;
        by_motif[spec.motif].add(iou);
        if (spec.motif == Motif::Wall || spec.motif == Motif::GroundBoxes) {
            box_wall.add(iou);
        }
        vis1_ge_vis4 += r1.mask.count() >= r4.mask.count();
    }
    for (const auto& [motif, d] : by_motif) {
        note("[5] %-24s IoU(d=4, d=1): %s", std::string(to_string(motif)).c_str(), d.describe().c_str());
    }
    note("[5] |visible d=1| >= |visible d=4| in %d/%d scenes (property target 90%%)", vis1_ge_vis4, kScenes);

    // Benchmark-scale reference point.
    for (Motif motif : {Motif::GroundBoxes, Motif::Wall}) {
        Distribution kitti;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            SceneSpec spec;
            spec.seed = 60000 + seed;
            spec.dims = {256, 256, 32};
            spec.image_width = 1226;
            spec.image_height = 370;
            spec.density = 0.15;
            spec.motif = motif;
            spec.camera = CameraPlacement::Kitti;
            const auto s = generate(spec);
            kitti.add(compare_masks(raster(s, 4, 0, "stride").mask, raster(s, 1, 0, "stride").mask).iou);
        }
        note("[5] 256x256x32 @ 1226x370 %s: IoU(d=4, d=1) %s", std::string(to_string(motif)).c_str(),
             kitti.describe().c_str());
    }
    const double median = box_wall.median();
    return {5, "stride sensitivity", median >= 0.90,
            format("box/wall median IoU(d=4, d=1) = %.4f over %zu scenes (target >= 0.90)", median,
                   box_wall.values.size())};
}

// 6 ------------------------------------------------------------------------
VoxelToWorld line_meta(std::size_t n) {
    VoxelToWorld m;
    m.dims = {static_cast<int>(n), 1, 1};
    return m;
}

SemanticVoxelGrid line_grid(const std::vector<int>& labels) {
    return SemanticVoxelGrid(line_meta(labels.size()), std::vector<Label>(labels.begin(), labels.end()));
}

SemanticVoxelGrid random_grid(const GridDims& dims, std::mt19937_64& rng, int num_classes, double density) {
    VoxelToWorld m;
    m.dims = dims;
    SemanticVoxelGrid g(m);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> lab(1, num_classes - 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (u(rng) < density) {
            g.set(i, static_cast<Label>(lab(rng)));
        }
    }
    return g;
}

Verdict metrics_exactness() {
    int fixture_failures = 0;
    for (const auto& fx : test::kConfusionFixtures) {
        VoxelMask invalid(line_meta(fx.gt.size()).dims);
        for (int i : fx.invalid) {
            invalid.set(static_cast<std::size_t>(i));
        }
        const auto r = semantic_miou(line_grid(fx.pred), line_grid(fx.gt), fx.invalid.empty() ? nullptr : &invalid,
                                     fx.num_classes, fx.strict);
        bool ok = r.per_class.size() == static_cast<std::size_t>(fx.num_classes - 1);
        for (const auto& c : r.per_class) {
            test::ExpectedClass e{c.id, 0, 0, 0};
            for (const auto& x : fx.classes) {
                if (x.id == c.id) {
                    e = x;
                }
            }
            ok = ok && c.tp == e.tp && c.fp == e.fp && c.fn == e.fn;
        }
        ok = ok && std::abs(r.iou - static_cast<double>(fx.iou[0]) / static_cast<double>(fx.iou[1])) <= 1e-12;
        ok = ok && std::abs(r.miou - static_cast<double>(fx.miou[0]) / static_cast<double>(fx.miou[1])) <= 1e-12;
        ok = ok && r.miou_loss == 1.0 - r.miou;
        fixture_failures += !ok;
    }

    std::mt19937_64 rng(6);
    int identity_failures = 0;
    for (int i = 0; i < 20; ++i) {
        const auto g = random_grid({8, 8, 8}, rng, 20, 0.3);
        const auto r = semantic_miou(g, g, nullptr, 20);
        identity_failures += !(r.miou == 1.0 && r.miou_loss == 0.0 && r.iou == 1.0);
    }

    int concat_failures = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = random_grid({8, 8, 8}, rng, 6, 0.4), xg = random_grid({8, 8, 8}, rng, 6, 0.4);
        const auto y = random_grid({8, 8, 8}, rng, 6, 0.2), yg = random_grid({8, 8, 8}, rng, 6, 0.5);
        const auto acc = accumulate(accumulate(ClassConfusion(6), x, xg), y, yg);
        std::vector<Label> cp(x.labels().begin(), x.labels().end()), cg(xg.labels().begin(), xg.labels().end());
        cp.insert(cp.end(), y.labels().begin(), y.labels().end());
        cg.insert(cg.end(), yg.labels().begin(), yg.labels().end());
        const auto meta = line_meta(cp.size());
        ClassConfusion whole(6);
        whole.add(SemanticVoxelGrid(meta, cp), SemanticVoxelGrid(meta, cg));
        const auto a = acc.finalize(), b = whole.finalize();
        concat_failures += !(acc == whole && a.iou == b.iou && a.miou == b.miou);
    }
    const bool pass = fixture_failures == 0 && identity_failures == 0 && concat_failures == 0;
    return {6, "metrics exactness", pass,
            format("fixtures %d/%zu wrong, identity %d/20 wrong, accumulate vs concatenate %d/100 wrong",
                   fixture_failures, test::kConfusionFixtures.size(), identity_failures, concat_failures)};
}

// 7 ------------------------------------------------------------------------
Verdict round_trip_io() {
    const auto dir = std::filesystem::temp_directory_path() / ("voxvis-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> extent(1, 20);
    std::uniform_real_distribution<double> a(-1, 1);
    int bad_label = 0, bad_mask = 0, bad_calib = 0, bad_raw = 0, bad_png = 0;
    for (int i = 0; i < 100; ++i) {
        VoxelToWorld meta;
        meta.dims = {extent(rng), extent(rng), extent(rng)};
        SemanticVoxelGrid g(meta);
        for (std::size_t k = 0; k < g.size(); ++k) {
            g.set(k, static_cast<Label>(rng()));
        }
        save_labels(dir / "x.label", g);
        const auto lbytes = read_file_bytes(dir / "x.label");
        const auto gl = load_labels(dir / "x.label", meta);
        save_labels(dir / "y.label", gl);
        bad_label += !(gl == g && read_file_bytes(dir / "y.label") == lbytes);

        VoxelMask m(meta.dims);
        for (std::size_t k = 0; k < m.size(); ++k) {
            m.set(k, (rng() & 1) != 0);
        }
        save_mask(dir / "x.mask", m);
        const auto ml = load_mask(dir / "x.mask", meta.dims);
        save_mask(dir / "y.mask", ml);
        bad_mask += !(ml == m && read_file_bytes(dir / "y.mask") == read_file_bytes(dir / "x.mask"));

        CameraRig rig;
        rig.intrinsics = {50 + 1000 * std::abs(a(rng)), 50 + 1000 * std::abs(a(rng)), 0, 0, extent(rng) * 50,
                          extent(rng) * 20};
        rig.intrinsics.cx = std::abs(a(rng)) * (rig.intrinsics.width - 1);
        rig.intrinsics.cy = std::abs(a(rng)) * (rig.intrinsics.height - 1);
        rig.extrinsics.rotation =
            Eigen::Quaterniond(Eigen::Vector4d(a(rng), a(rng), a(rng), a(rng)).normalized()).toRotationMatrix();
        rig.extrinsics.translation = {a(rng) * 100, a(rng) * 1e-7, a(rng)};
        rig.grid.dims = meta.dims;
        rig.grid.voxel_size = 0.01 + std::abs(a(rng));
        rig.grid.placement.translation = {a(rng) * 50, a(rng) * 50, a(rng)};
        save_calibration(dir / "x.calib", rig);
        const auto rl = load_calibration(dir / "x.calib");
        save_calibration(dir / "y.calib", rl);
        const bool same = rl.intrinsics == rig.intrinsics && rl.grid.dims == rig.grid.dims &&
                          std::memcmp(rl.extrinsics.rotation.data(), rig.extrinsics.rotation.data(), 9 * 8) == 0 &&
                          std::memcmp(rl.extrinsics.translation.data(), rig.extrinsics.translation.data(), 24) == 0 &&
                          std::memcmp(rl.grid.placement.translation.data(), rig.grid.placement.translation.data(),
                                      24) == 0 &&
                          std::memcmp(&rl.grid.voxel_size, &rig.grid.voxel_size, 8) == 0;
        bad_calib += !(same && read_file_bytes(dir / "y.calib") == read_file_bytes(dir / "x.calib"));

        const int w = extent(rng) * 3, h = extent(rng) * 2;
        DepthMap raw(w, h);
        for (auto& d : raw.depth) {
            const std::uint32_t bits = static_cast<std::uint32_t>(rng());
            std::memcpy(&d, &bits, 4);
        }
        save_depth(dir / "x.raw", raw, DepthFormat::Raw32);
        const auto rawl = load_depth(dir / "x.raw", DepthFormat::Raw32, w, h);
        bad_raw += !(std::memcmp(rawl.depth.data(), raw.depth.data(), raw.depth.size() * 4) == 0 &&
                     encode_depth(rawl, DepthFormat::Raw32) == read_file_bytes(dir / "x.raw"));

        DepthMap png(w, h);
        for (auto& d : png.depth) {
            d = static_cast<float>(rng() % 65536) / 256.0f;
        }
        save_depth(dir / "x.png", png, DepthFormat::Png16);
        const auto pngl = load_depth(dir / "x.png", DepthFormat::Png16, w, h);
        save_depth(dir / "y.png", pngl, DepthFormat::Png16);
        bad_png += !(pngl == png && std::memcmp(pngl.depth.data(), png.depth.data(), png.depth.size() * 4) == 0 &&
                     read_file_bytes(dir / "y.png") == read_file_bytes(dir / "x.png"));
    }
    std::filesystem::remove_all(dir);
    const bool pass = bad_label + bad_mask + bad_calib + bad_raw + bad_png == 0;
    return {7, "round-trip I/O", pass,
            format("mismatches of 100 each: label %d, mask %d, calibration %d, raw32 %d, png16 %d", bad_label,
                   bad_mask, bad_calib, bad_raw, bad_png)};
}

// 8 ------------------------------------------------------------------------
Verdict depth_round_trip() {
    int violations = 0;
    std::uint64_t points = 0, outside = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        auto spec = mixed_family(i, 70000);
        if (spec.camera == CameraPlacement::Fuzz) {
            spec.camera = CameraPlacement::Orbit;
        }
        const auto s = generate(spec);
        const auto depth = render_reference_depth(s.grid, s.rig);
        const auto occ = occupancy_from_depth(depth, s.rig);
        // The rendered depth samples pixel centers, the same rays as supersample 1.
        const auto halo = dilate(cast_visibility(s.grid, s.rig, {1, false, 1}), 1);
        const auto bad = mask_difference(occ, halo).count();
        violations += bad > 0;
        outside += bad;
        points += occ.count();
    }
    return {8, "depth round trip", violations == 0,
            format("%d/50 scenes with voxels outside dilate1(oracle); %llu of %llu occupied voxels", violations,
                   static_cast<unsigned long long>(outside), static_cast<unsigned long long>(points))};
}

// 9 ------------------------------------------------------------------------
Verdict performance() {
    const int hw = resolve_threads(0);
    bool pass = true;
    std::string summary;
    for (const auto& [motif, density] : {std::pair{Motif::GroundBoxes, 0.15}, std::pair{Motif::Random, 0.3}}) {
        SceneSpec spec;
        spec.seed = 9;
        spec.dims = {256, 256, 32};
        spec.image_width = 1226;
        spec.image_height = 370;
        spec.density = density;
        spec.motif = motif;
        spec.camera = CameraPlacement::Kitti;
        const auto s = generate(spec);
        std::map<int, double> best;
        for (int threads : {1, 8}) {
            best[threads] = INFINITY;
            for (int rep = 0; rep < 3; ++rep) {
                const auto t0 = Clock::now();
                const auto r = extract_visible_labels(s.grid, s.rig, {4, threads});
                best[threads] = std::min(best[threads], seconds_since(t0));
                if (rep == 0 && threads == 1) {
                    note("[9] %s density %.2f: occupied %llu, visible %llu", std::string(to_string(motif)).c_str(),
                         density, static_cast<unsigned long long>(r.stats.occupied),
                         static_cast<unsigned long long>(r.stats.visible));
                }
            }
        }
        note("[9] %s: 1 thread %.3f s, 8 threads %.3f s (hardware threads: %d)", std::string(to_string(motif)).c_str(),
             best[1], best[8], hw);
        pass = pass && best[1] < 5.0 && best[8] < 1.5;
        summary += format("%s%s 1t %.2f s / 8t %.2f s", summary.empty() ? "" : "; ",
                          std::string(to_string(motif)).c_str(), best[1], best[8]);
    }
    return {9, "performance", pass, summary + " (limits 5 s / 1.5 s)"};
}

// 10 -----------------------------------------------------------------------
Verdict oracle_monotonicity() {
    int violations = 0;
    std::mt19937_64 rng(10);
    for (std::uint64_t trial = 0; trial < 500; ++trial) {
        auto spec = mixed_family(trial, 80000);
        if (trial % 3 == 0) {
            spec.density = 0.3;
        }
        auto s = generate(spec);
        const auto occ = extract_occupied(s.grid);
        if (occ.empty()) {
            continue;
        }
        const auto before = cast_visibility(s.grid, s.rig);
        const auto victim = occ.indices[rng() % occ.size()];
        s.grid.set(std::size_t{victim}, 0);
        auto after = cast_visibility(s.grid, s.rig);
        after.set(std::size_t{victim});
        violations += !before.is_subset_of(after);
    }
    return {10, "oracle monotonicity", violations == 0, format("%d violations in 500 deletions", violations)};
}

std::set<int> parse_ids(const std::string& list) {
    std::set<int> ids;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            ids.insert(std::stoi(item));
        }
    }
    return ids;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known_fail, only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--known-fail" && i + 1 < argc) {
            known_fail = parse_ids(argv[++i]);
        } else if (arg == "--only" && i + 1 < argc) {
            only = parse_ids(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--known-fail 1,5] [--only 3,4]\n", argv[0]);
            return 2;
        }
    }
    using Fn = Verdict (*)();
    // Criterion 2 runs last so it also covers every scene rasterized before it.
    const std::vector<std::pair<int, Fn>> order = {
        {1, oracle_agreement},   {3, determinism},     {4, depth_fidelity},   {5, stride_sensitivity},
        {6, metrics_exactness},  {7, round_trip_io},   {8, depth_round_trip}, {9, performance},
        {10, oracle_monotonicity}, {2, subset_invariant}};
    std::vector<Verdict> verdicts;
    for (const auto& [id, fn] : order) {
        if (!only.empty() && !only.contains(id)) {
            continue;
        }
        const auto t0 = Clock::now();
        try {
            verdicts.push_back(fn());
        } catch (const std::exception& e) {
            verdicts.push_back({id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what()});
        }
        note("[%d] done in %.1f s", id, seconds_since(t0));
    }
    std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
    int unexpected = 0;
    for (const auto& v : verdicts) {
        const bool known = known_fail.contains(v.id);
        std::printf("%s %2d %s: %s%s\n", v.pass ? "PASS" : "FAIL", v.id, v.name.c_str(), v.summary.c_str(),
                    !v.pass && known ? " [known failure]" : "");
        unexpected += !v.pass && !known;
    }
    return unexpected == 0 ? 0 : 1;
}

// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxvis/calibration.hpp"
#include "voxvis/depth_occupancy.hpp"
#include "voxvis/error.hpp"
#include "voxvis/grid_io.hpp"
#include "voxvis/metrics.hpp"
#include "voxvis/oracle.hpp"
#include "voxvis/parallel.hpp"
#include "voxvis/ply.hpp"
#include "voxvis/raster.hpp"
#include "voxvis/scene_synth.hpp"

namespace voxvis::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public Error {
public:
    using Error::Error;
};

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvariantError*>(&e) != nullptr) {
        return kExitInternal;
    }
    if (dynamic_cast<const Error*>(&e) != nullptr ||
        dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) {
        return kExitUsage;
    }
    return kExitInternal;
}

std::string kind_of(const std::exception& e) {
    if (dynamic_cast<const InvariantError*>(&e)) return "invariant violation";
    if (dynamic_cast<const ParameterError*>(&e)) return "parameter error";
    if (dynamic_cast<const FormatError*>(&e)) return "format error";
    if (dynamic_cast<const ShapeError*>(&e)) return "shape error";
    if (dynamic_cast<const DataError*>(&e)) return "data error";
    if (dynamic_cast<const IoError*>(&e)) return "i/o error";
    if (dynamic_cast<const GuardError*>(&e)) return "refused";
    if (dynamic_cast<const UsageError*>(&e)) return "usage error";
    if (dynamic_cast<const Error*>(&e)) return "error";
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return "i/o error";
    return "internal error";
}

std::string cell(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_null()) {
        return "-";
    }
    if (v.is_number_float()) {
        std::ostringstream s;
        s << std::setprecision(6) << v.get<double>();
        return s.str();
    }
    return v.dump();
}

void print_table(std::ostream& out, const json& record) {
    std::size_t key_width = 0;
    for (const auto& [k, v] : record.items()) {
        key_width = std::max(key_width, k.size());
    }
    for (const auto& [k, v] : record.items()) {
        out << std::left << std::setw(static_cast<int>(key_width) + 2) << k << cell(v) << '\n';
    }
}

void emit(std::ostream& out, const json& record, bool pretty) {
    if (pretty) {
        print_table(out, record);
        out << '\n';
    } else {
        out << record.dump() << '\n';
    }
}

GridDims dims_from(const std::vector<int>& v) {
    GridDims d{v.at(0), v.at(1), v.at(2)};
    d.validate();
    return d;
}

json stats_json(const RasterStats& s) {
    return {{"occupied", s.occupied},
            {"clipped", s.clipped},
            {"visible", s.visible},
            {"pixels_written", s.pixels_written},
            {"degenerate_faces", s.degenerate_faces},
            {"wall_ms", s.wall_ms},
            {"off_screen", s.off_screen},
            {"depth_fallbacks", s.depth_fallbacks}};
}

void check_stride(int stride) {
    if (stride < 1) {
        throw ParameterError("--stride must be >= 1, got " + std::to_string(stride));
    }
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
    std::string labels, calib, out, manifest;
    int stride = kDefaultStride;
    int threads = 0;
    int jobs = 1;
    bool stats = false;
    bool keep_going = false;
    bool pretty = false;
};

struct JobOutcome {
    std::vector<json> records;
    std::string error;
    int code = kExitOk;
    bool ran = false;
};

std::vector<json> run_extract_job(const Job& job, const ExtractArgs& a) {
    const CameraRig rig = load_calibration(job.calib);
    const SemanticVoxelGrid grid = load_labels(job.labels, rig.grid);
    RasterOptions opts;
    opts.stride = a.stride;
    opts.threads = a.threads;
    const VisibleLabels vis = extract_visible_labels(grid, rig, opts);

    fs::create_directories(job.out_dir);
    const std::string stem = job.labels.stem().string();
    const fs::path label_out = job.out_dir / (stem + ".visible.label");
    const fs::path mask_out = job.out_dir / (stem + ".visible.mask");
    save_labels(label_out, vis.labels);
    save_mask(mask_out, vis.mask);

    std::vector<json> records;
    records.push_back({{"input", job.labels.string()},
                       {"visible_label", label_out.string()},
                       {"visible_mask", mask_out.string()},
                       {"occupied", vis.stats.occupied},
                       {"visible", vis.stats.visible}});
    if (a.stats) {
        json s = stats_json(vis.stats);
        s["input"] = job.labels.string();
        records.push_back(std::move(s));
    }
    return records;
}

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
    check_stride(a.stride);
    JobManifest manifest;
    if (!a.manifest.empty()) {
        if (!a.labels.empty() || !a.calib.empty()) {
            throw UsageError("--manifest cannot be combined with --labels/--calib");
        }
        const auto bytes = read_file_bytes(a.manifest);
        manifest = parse_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                                   bytes.size()),
                                  fs::path(a.manifest).parent_path());
    } else {
        if (a.labels.empty() || a.calib.empty() || a.out.empty()) {
            throw UsageError("extract needs --labels, --calib and --out (or --manifest)");
        }
        manifest.jobs.push_back({a.labels, a.calib, a.out});
    }

    const auto missing = missing_inputs(manifest);
    if (!missing.empty()) {
        for (const auto& m : missing) {
            err << "input error: missing input " << m.string() << '\n';
        }
        return kExitUsage;
    }

    std::vector<JobOutcome> outcomes(manifest.jobs.size());
    std::atomic<bool> stop{false};
    parallel_chunks(manifest.jobs.size(), 1, std::max(1, a.jobs), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (stop.load()) {
                return;
            }
            JobOutcome& o = outcomes[i];
            o.ran = true;
            try {
                o.records = run_extract_job(manifest.jobs[i], a);
            } catch (const std::exception& e) {
                o.code = exit_code_for(e);
                o.error = manifest.jobs[i].labels.string() + ": " + kind_of(e) + ": " + e.what();
                if (!a.keep_going) {
                    stop.store(true);
                }
            }
        }
    });

    int code = kExitOk;
    for (const auto& o : outcomes) {
        for (const auto& r : o.records) {
            emit(out, r, a.pretty);
        }
        if (!o.error.empty()) {
            err << o.error << '\n';
            code = std::max(code, o.code);
        }
    }
    return code;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
    std::string labels, calib;
    int stride = 1;
    int supersample = kDefaultSupersample;
    int threads = 0;
    bool allow_large = false;
    bool pretty = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
    check_stride(a.stride);
    const CameraRig rig = load_calibration(a.calib);
    const SemanticVoxelGrid grid = load_labels(a.labels, rig.grid);
    RasterOptions ropts;
    ropts.stride = a.stride;
    ropts.threads = a.threads;
    OracleOptions oopts;
    oopts.supersample = a.supersample;
    oopts.allow_large = a.allow_large;
    oopts.threads = a.threads;
    const VoxelMask oracle = cast_visibility(grid, rig, oopts);
    const VisibilityResult vis = rasterize_visibility(grid, rig, ropts);
    const MaskAgreement m = compare_masks(vis.mask, oracle);
    emit(out,
         {{"input", a.labels},
          {"stride", a.stride},
          {"supersample", a.supersample},
          {"vrle_visible", vis.mask.count()},
          {"oracle_visible", oracle.count()},
          {"iou", m.iou},
          {"intersection", m.intersection},
          {"union", m.union_count},
          {"only_vrle", m.only_a},
          {"only_oracle", m.only_b}},
         a.pretty);
    return kExitOk;
}

// ---------------------------------------------------------------- occupancy

struct OccupancyArgs {
    std::string depth, calib, out;
    std::string format = "raw32";
    int dilate = 0;
    int threads = 0;
    bool pretty = false;
};

int cmd_occupancy(const OccupancyArgs& a, std::ostream& out) {
    if (a.dilate < 0) {
        throw ParameterError("--dilate must be >= 0");
    }
    const DepthFormat fmt = parse_depth_format(a.format);
    const CameraRig rig = load_calibration(a.calib);
    const DepthMap depth = load_depth(a.depth, fmt, rig.intrinsics.width, rig.intrinsics.height);
    OccupancyOptions opts;
    opts.dilate = a.dilate;
    opts.threads = a.threads;
    const VoxelMask mask = occupancy_from_depth(depth, rig, opts);
    save_mask(a.out, mask);
    emit(out,
         {{"output", a.out},
          {"valid_pixels", depth.valid_count()},
          {"occupied", mask.count()},
          {"dilate", a.dilate}},
         a.pretty);
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string pred, gt, calib, invalid, within;
    std::vector<int> dims;
    int num_classes = 20;
    bool strict = false;
    bool pretty = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    VoxelToWorld meta;
    if (!a.calib.empty()) {
        meta = load_calibration(a.calib).grid;
    } else if (a.dims.size() == 3) {
        meta.dims = dims_from(a.dims);
    } else {
        throw UsageError("eval needs --calib or --dims X Y Z");
    }
    const SemanticVoxelGrid pred = load_labels(a.pred, meta);
    const SemanticVoxelGrid gt = load_labels(a.gt, meta);
    std::optional<VoxelMask> invalid;
    if (!a.invalid.empty()) {
        invalid = load_mask(a.invalid, meta.dims);
    }
    if (!a.within.empty()) {
        const VoxelMask outside = mask_complement(load_mask(a.within, meta.dims));
        invalid = invalid ? mask_union(*invalid, outside) : outside;
    }
    const EvalReport r =
        semantic_miou(pred, gt, invalid ? &*invalid : nullptr, a.num_classes, a.strict);
    if (a.pretty) {
        out << format_report_table(r, fs::path(a.pred).stem().string()) << '\n';
        return kExitOk;
    }
    json per = json::array();
    for (const auto& c : r.per_class) {
        per.push_back({{"id", c.id},
                       {"iou", c.iou ? json(*c.iou) : json(nullptr)},
                       {"tp", c.tp},
                       {"fp", c.fp},
                       {"fn", c.fn}});
    }
    emit(out, {{"iou", r.iou}, {"miou", r.miou}, {"miou_loss", r.miou_loss}, {"per_class", per}},
         false);
    return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::uint64_t seed = 0;
    std::vector<int> dims{16, 16, 16};
    std::vector<int> image{64, 64};
    double density = 0.2;
    double voxel_size = 0.2;
    int num_classes = 20;
    std::string motif = "random";
    std::string camera = "front";
    std::string out = ".";
    std::string name = "scene";
    std::string depth_format;
    bool allow_large = false;
    bool pretty = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    SceneSpec spec;
    spec.seed = a.seed;
    spec.dims = dims_from(a.dims);
    spec.density = a.density;
    spec.motif = parse_motif(a.motif);
    spec.camera = parse_camera_placement(a.camera);
    spec.voxel_size = a.voxel_size;
    spec.image_width = a.image.at(0);
    spec.image_height = a.image.at(1);
    spec.num_classes = a.num_classes;
    std::optional<DepthFormat> fmt;
    if (!a.depth_format.empty()) {
        fmt = parse_depth_format(a.depth_format);
    }
    const SynthScene scene = generate(spec);

    fs::create_directories(a.out);
    const fs::path label_path = fs::path(a.out) / (a.name + ".label");
    const fs::path calib_path = fs::path(a.out) / (a.name + ".calib");
    save_labels(label_path, scene.grid);
    save_calibration(calib_path, scene.rig);
    json record = {{"label", label_path.string()},
                   {"calib", calib_path.string()},
                   {"occupied", extract_occupied(scene.grid).size()}};
    if (fmt) {
        const fs::path depth_path =
            fs::path(a.out) / (a.name + (*fmt == DepthFormat::Png16 ? ".depth.png" : ".depth.raw"));
        save_depth(depth_path, render_reference_depth(scene.grid, scene.rig, a.allow_large), *fmt);
        record["depth"] = depth_path.string();
    }
    emit(out, record, a.pretty);
    return kExitOk;
}

// ---------------------------------------------------------------- export-ply

struct PlyArgs {
    std::string labels, calib, mask, out;
    bool pretty = false;
};

int cmd_export_ply(const PlyArgs& a, std::ostream& out) {
    const CameraRig rig = load_calibration(a.calib);
    const SemanticVoxelGrid grid = load_labels(a.labels, rig.grid);
    std::optional<VoxelMask> only;
    if (!a.mask.empty()) {
        only = load_mask(a.mask, rig.grid.dims);
    }
    const auto bytes = encode_ply(grid, only ? &*only : nullptr);
    write_file_bytes(a.out, bytes);
    std::size_t points = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        points += grid.at(i) != kEmptyLabel && (!only || only->test(i)) ? 1 : 0;
    }
    emit(out, {{"output", a.out}, {"points", points}, {"bytes", bytes.size()}}, a.pretty);
    return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string labels, calib;
    std::vector<int> dims{256, 256, 32};
    std::vector<int> image{1226, 370};
    std::vector<int> threads;
    std::uint64_t seed = 0;
    double density = 0.15;
    std::string motif = "ground-plane-plus-boxes";
    int stride = kDefaultStride;
    int repeat = 5;
    bool pretty = false;
};

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto b : bytes) {
        h = (h ^ b) * 0x100000001b3ull;
    }
    return h;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    check_stride(a.stride);
    if (a.repeat < 1) {
        throw ParameterError("--repeat must be >= 1");
    }
    SemanticVoxelGrid grid;
    CameraRig rig;
    std::string source;
    if (!a.labels.empty() || !a.calib.empty()) {
        if (a.labels.empty() || a.calib.empty()) {
            throw UsageError("bench needs both --labels and --calib, or neither");
        }
        rig = load_calibration(a.calib);
        grid = load_labels(a.labels, rig.grid);
        source = a.labels;
    } else {
        SceneSpec spec;
        spec.seed = a.seed;
        spec.dims = dims_from(a.dims);
        spec.image_width = a.image.at(0);
        spec.image_height = a.image.at(1);
        spec.density = a.density;
        spec.motif = parse_motif(a.motif);
        spec.camera = CameraPlacement::Kitti;
        SynthScene scene = generate(spec);
        grid = std::move(scene.grid);
        rig = scene.rig;
        source = "synth:" + std::string(to_string(spec.motif));
    }

    std::vector<int> thread_counts = a.threads;
    if (thread_counts.empty()) {
        thread_counts = {1, resolve_threads(0)};
        if (thread_counts[1] == 1) {
            thread_counts.pop_back();
        }
    }
    for (const int t : thread_counts) {
        RasterOptions opts;
        opts.stride = a.stride;
        opts.threads = t;
        std::vector<double> ms;
        VisibilityResult last;
        for (int r = 0; r < a.repeat; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            last = rasterize_visibility(grid, rig, opts);
            ms.push_back(
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count());
        }
        std::sort(ms.begin(), ms.end());
        emit(out,
             {{"source", source},
              {"dims", {grid.dims().x, grid.dims().y, grid.dims().z}},
              {"image", {rig.intrinsics.width, rig.intrinsics.height}},
              {"stride", a.stride},
              {"threads", resolve_threads(t)},
              {"hardware_threads", std::thread::hardware_concurrency()},
              {"repeat", a.repeat},
              {"min_ms", ms.front()},
              {"median_ms", ms[ms.size() / 2]},
              {"occupied", last.stats.occupied},
              {"visible", last.stats.visible},
              {"mask_fnv1a", fnv1a(last.mask.bytes())}},
             a.pretty);
    }
    return kExitOk;
}

}  // namespace

JobManifest parse_manifest(std::string_view text, const fs::path& base) {
    JobManifest m;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    const auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() || base.empty() ? path : base / path;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::vector<std::string> parts;
        for (std::string f; fields >> f;) {
            parts.push_back(f);
        }
        if (parts.empty()) {
            continue;
        }
        if (parts.size() != 3) {
            throw FormatError("manifest line " + std::to_string(lineno) +
                              ": expected `labels calib out_dir`, got " +
                              std::to_string(parts.size()) + " fields");
        }
        m.jobs.push_back({resolve(parts[0]), resolve(parts[1]), resolve(parts[2])});
    }
    return m;
}

std::vector<fs::path> missing_inputs(const JobManifest& manifest) {
    std::vector<fs::path> out;
    for (const auto& job : manifest.jobs) {
        for (const auto* p : {&job.labels, &job.calib}) {
            std::error_code ec;
            if (!fs::is_regular_file(*p, ec)) {
                out.push_back(*p);
            }
        }
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"voxvis: visible-region label extraction, occupancy lifting and SSC metrics"};
    app.name("voxvis");
    app.require_subcommand(1);

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "Visible labels and mask for labeled grids");
    extract->add_option("--labels", ex.labels, "Input .label grid");
    extract->add_option("--calib", ex.calib, "Calibration file");
    extract->add_option("--out", ex.out, "Output directory");
    extract->add_option("--manifest", ex.manifest, "Batch file of `labels calib out_dir` lines");
    extract->add_option("--stride", ex.stride, "Sampling stride in pixels")->capture_default_str();
    extract->add_option("--threads", ex.threads, "Raster threads (0 = all cores)");
    extract->add_option("--jobs", ex.jobs, "Batch items processed concurrently")->capture_default_str();
    extract->add_flag("--stats", ex.stats, "Emit a stats record per item");
    extract->add_flag("--keep-going", ex.keep_going, "Continue the batch after a failed item");
    extract->add_flag("--pretty", ex.pretty, "Human-readable tables");

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Compare rasterized visibility with ray casting");
    validate->add_option("--labels", va.labels)->required();
    validate->add_option("--calib", va.calib)->required();
    validate->add_option("--stride", va.stride)->capture_default_str();
    validate->add_option("--supersample", va.supersample)->capture_default_str();
    validate->add_option("--threads", va.threads);
    validate->add_flag("--allow-large", va.allow_large, "Lift the oracle grid-size guard");
    validate->add_flag("--pretty", va.pretty);

    OccupancyArgs oc;
    auto* occupancy = app.add_subcommand("occupancy", "Occupancy mask from a depth map");
    occupancy->add_option("--depth,--depth-path", oc.depth)->required();
    occupancy->add_option("--calib", oc.calib)->required();
    occupancy->add_option("--out", oc.out, "Output .mask")->required();
    occupancy->add_option("--depth-format", oc.format, "raw32 | png16")->capture_default_str();
    occupancy->add_option("--dilate", oc.dilate, "Cubic dilation radius in voxels");
    occupancy->add_option("--threads", oc.threads);
    occupancy->add_flag("--pretty", oc.pretty);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Geometric IoU and semantic mIoU");
    eval->add_option("--pred", ev.pred)->required();
    eval->add_option("--gt", ev.gt)->required();
    eval->add_option("--calib", ev.calib, "Calibration (for dims)");
    eval->add_option("--dims", ev.dims, "X Y Z")->expected(3);
    eval->add_option("--invalid", ev.invalid, "Mask of voxels to exclude");
    eval->add_option("--within", ev.within, "Only evaluate voxels in this mask");
    eval->add_option("--num-classes", ev.num_classes)->capture_default_str();
    eval->add_flag("--strict-classes", ev.strict, "Absent classes count as IoU 0");
    eval->add_flag("--pretty", ev.pretty);

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Write a synthetic .label + calibration pair");
    synth->add_option("--seed", sy.seed)->capture_default_str();
    synth->add_option("--dims", sy.dims)->expected(3);
    synth->add_option("--image", sy.image, "W H")->expected(2);
    synth->add_option("--density", sy.density)->capture_default_str();
    synth->add_option("--voxel-size", sy.voxel_size)->capture_default_str();
    synth->add_option("--num-classes", sy.num_classes)->capture_default_str();
    synth->add_option("--motif", sy.motif, "random | wall | corridor | ground-plane-plus-boxes");
    synth->add_option("--camera", sy.camera, "front | orbit | fuzz | kitti");
    synth->add_option("--out", sy.out)->capture_default_str();
    synth->add_option("--name", sy.name)->capture_default_str();
    synth->add_option("--depth-format", sy.depth_format, "Also render reference depth (raw32 | png16)");
    synth->add_flag("--allow-large", sy.allow_large);
    synth->add_flag("--pretty", sy.pretty);

    PlyArgs pl;
    auto* ply = app.add_subcommand("export-ply", "Colored voxel-center point cloud");
    ply->add_option("--labels", pl.labels)->required();
    ply->add_option("--calib", pl.calib)->required();
    ply->add_option("--mask", pl.mask, "Only export voxels in this mask");
    ply->add_option("--out", pl.out)->required();
    ply->add_flag("--pretty", pl.pretty);

    BenchArgs be;
    auto* bench = app.add_subcommand("bench", "Time rasterize_visibility");
    bench->add_option("--labels", be.labels);
    bench->add_option("--calib", be.calib);
    bench->add_option("--dims", be.dims)->expected(3);
    bench->add_option("--image", be.image)->expected(2);
    bench->add_option("--threads", be.threads, "Thread counts, e.g. 1,8")->delimiter(',');
    bench->add_option("--seed", be.seed);
    bench->add_option("--density", be.density)->capture_default_str();
    bench->add_option("--motif", be.motif)->capture_default_str();
    bench->add_option("--stride", be.stride)->capture_default_str();
    bench->add_option("--repeat", be.repeat)->capture_default_str();
    bench->add_flag("--pretty", be.pretty);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (extract->parsed()) return cmd_extract(ex, out, err);
        if (validate->parsed()) return cmd_validate(va, out);
        if (occupancy->parsed()) return cmd_occupancy(oc, out);
        if (eval->parsed()) return cmd_eval(ev, out);
        if (synth->parsed()) return cmd_synth(sy, out);
        if (ply->parsed()) return cmd_export_ply(pl, out);
        if (bench->parsed()) return cmd_bench(be, out);
    } catch (const std::exception& e) {
        err << "voxvis: " << kind_of(e) << ": " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitUsage;
}

}  // namespace voxvis::cli

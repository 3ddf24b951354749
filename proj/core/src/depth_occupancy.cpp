// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/depth_occupancy.hpp"

#include <bit>
#include <cstring>
#include <string>

#include <png.h>

#include "voxvis/error.hpp"
#include "voxvis/grid_io.hpp"
#include "voxvis/parallel.hpp"

namespace voxvis {
namespace {

std::vector<std::uint8_t> encode_raw32(const DepthMap& depth) {
    std::vector<std::uint8_t> out(depth.depth.size() * 4);
    for (std::size_t i = 0; i < depth.depth.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(depth.depth[i]);
        for (int b = 0; b < 4; ++b) {
            out[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
        }
    }
    return out;
}

DepthMap decode_raw32(std::span<const std::uint8_t> bytes, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw ParameterError("raw32 depth needs a positive width and height");
    }
    DepthMap out(width, height);
    if (bytes.size() != out.depth.size() * 4) {
        throw FormatError("raw32 depth has " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(out.depth.size() * 4));
    }
    for (std::size_t i = 0; i < out.depth.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
            bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
        }
        out.depth[i] = std::bit_cast<float>(bits);
    }
    return out;
}

struct PngSource {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

void png_read_from_memory(png_structp png, png_bytep data, png_size_t length) {
    auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
    if (src->offset + length > src->bytes.size()) {
        png_error(png, "truncated PNG data");
    }
    std::memcpy(data, src->bytes.data() + src->offset, length);
    src->offset += length;
}

void png_write_to_memory(png_structp png, png_bytep data, png_size_t length) {
    auto* sink = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    sink->insert(sink->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

void png_warning_silent(png_structp, png_const_charp) {}

std::uint16_t to_png16(float d) {
    if (!DepthMap::is_valid(d)) {
        return 0;
    }
    const double v = std::nearbyint(static_cast<double>(d) * kPng16Scale);
    if (v > 65535.0) {
        throw DataError("depth " + std::to_string(d) + " m exceeds the png16 range");
    }
    return static_cast<std::uint16_t>(v);
}

std::vector<std::uint8_t> encode_png16(const DepthMap& depth) {
    if (depth.width <= 0 || depth.height <= 0) {
        throw ParameterError("cannot encode an empty depth map");
    }
    // Big-endian sample rows, prepared before libpng can longjmp.
    std::vector<std::uint8_t> pixels(depth.depth.size() * 2);
    for (std::size_t i = 0; i < depth.depth.size(); ++i) {
        const std::uint16_t v = to_png16(depth.depth[i]);
        pixels[2 * i] = static_cast<std::uint8_t>(v >> 8);
        pixels[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(depth.height));
    for (int r = 0; r < depth.height; ++r) {
        rows[r] = pixels.data() + static_cast<std::size_t>(r) * depth.width * 2;
    }
    std::vector<std::uint8_t> out;

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encoding failed");
    }
    png_set_write_fn(png, &out, png_write_to_memory, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(depth.width),
                 static_cast<png_uint_32>(depth.height), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

DepthMap decode_png16(std::span<const std::uint8_t> bytes, int width, int height) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw FormatError("not a PNG file");
    }
    PngSource src{bytes, 0};
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0;
    png_uint_32 h = 0;
    int bit_depth = 0;
    int color_type = 0;

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warning_silent);
    png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt or truncated PNG data");
    }
    png_set_read_fn(png, &src, png_read_from_memory);
    png_read_info(png, info);
    png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("depth PNG must be 16-bit grayscale");
    }
    if ((width > 0 && w != static_cast<png_uint_32>(width)) ||
        (height > 0 && h != static_cast<png_uint_32>(height))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("depth PNG is " + std::to_string(w) + "x" + std::to_string(h) +
                          ", expected " + std::to_string(width) + "x" + std::to_string(height));
    }
    pixels.resize(static_cast<std::size_t>(w) * h * 2);
    rows.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) {
        rows[r] = pixels.data() + static_cast<std::size_t>(r) * w * 2;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    DepthMap out(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < out.depth.size(); ++i) {
        const auto v = static_cast<std::uint16_t>((pixels[2 * i] << 8) | pixels[2 * i + 1]);
        out.depth[i] = v == 0 ? 0.0f : static_cast<float>(v / kPng16Scale);
    }
    return out;
}

}  // namespace

std::size_t DepthMap::valid_count() const noexcept {
    std::size_t n = 0;
    for (const float d : depth) {
        n += is_valid(d) ? 1 : 0;
    }
    return n;
}

bool operator==(const DepthMap& a, const DepthMap& b) {
    // Bitwise so NaN pixels compare equal to themselves.
    return a.width == b.width && a.height == b.height && a.depth.size() == b.depth.size() &&
           std::memcmp(a.depth.data(), b.depth.data(), a.depth.size() * sizeof(float)) == 0;
}

DepthFormat parse_depth_format(std::string_view tag) {
    if (tag == "raw32") {
        return DepthFormat::Raw32;
    }
    if (tag == "png16") {
        return DepthFormat::Png16;
    }
    throw ParameterError("unknown depth format '" + std::string(tag) + "' (raw32|png16)");
}

std::string_view to_string(DepthFormat format) noexcept {
    return format == DepthFormat::Raw32 ? "raw32" : "png16";
}

std::vector<std::uint8_t> encode_depth(const DepthMap& depth, DepthFormat format) {
    if (depth.depth.size() != static_cast<std::size_t>(depth.width) * depth.height) {
        throw ShapeError("depth map size does not match width x height");
    }
    return format == DepthFormat::Raw32 ? encode_raw32(depth) : encode_png16(depth);
}

DepthMap decode_depth(std::span<const std::uint8_t> bytes, DepthFormat format, int width,
                      int height) {
    return format == DepthFormat::Raw32 ? decode_raw32(bytes, width, height)
                                        : decode_png16(bytes, width, height);
}

DepthMap load_depth(const std::filesystem::path& path, DepthFormat format, int width,
                    int height) {
    const auto bytes = read_file_bytes(path);
    try {
        return decode_depth(bytes, format, width, height);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_depth(const std::filesystem::path& path, const DepthMap& depth, DepthFormat format) {
    write_file_bytes(path, encode_depth(depth, format));
}

VoxelMask occupancy_from_depth(const DepthMap& depth, const CameraRig& rig,
                               const OccupancyOptions& options) {
    if (depth.width != rig.intrinsics.width || depth.height != rig.intrinsics.height) {
        throw ShapeError("depth map is " + std::to_string(depth.width) + "x" +
                         std::to_string(depth.height) + " but the camera image is " +
                         std::to_string(rig.intrinsics.width) + "x" +
                         std::to_string(rig.intrinsics.height));
    }
    if (depth.depth.size() != static_cast<std::size_t>(depth.width) * depth.height) {
        throw ShapeError("depth map size does not match width x height");
    }
    rig.validate();

    const GridDims dims = rig.grid.dims;
    const RigidTransform camera_to_world = rig.extrinsics.inverse();
    VoxelMask mask(dims);
    parallel_chunks(
        static_cast<std::size_t>(depth.height), 16, options.threads,
        [&](std::size_t row_begin, std::size_t row_end) {
            for (std::size_t row = row_begin; row < row_end; ++row) {
                const int v = static_cast<int>(row);
                for (int u = 0; u < depth.width; ++u) {
                    const float d = depth.at(u, v);
                    if (!DepthMap::is_valid(d)) {
                        continue;
                    }
                    const Eigen::Vector3d cam = unproject(u + 0.5, v + 0.5, d, rig.intrinsics);
                    const Eigen::Vector3d lattice =
                        rig.grid.to_lattice(camera_to_world.apply(cam));
                    const Eigen::Vector3d cell = lattice.array().floor();
                    if (cell.x() >= 0 && cell.y() >= 0 && cell.z() >= 0 && cell.x() < dims.x &&
                        cell.y() < dims.y && cell.z() < dims.z) {
                        mask.set_atomic(dims.linear(Index3{static_cast<int>(cell.x()),
                                                           static_cast<int>(cell.y()),
                                                           static_cast<int>(cell.z())}));
                    }
                }
            }
        });
    return options.dilate > 0 ? dilate(mask, options.dilate) : mask;
}

}  // namespace voxvis

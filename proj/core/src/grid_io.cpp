// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/grid_io.hpp"

#include <fstream>
#include <iterator>
#include <string>
#include <system_error>

#include "voxvis/error.hpp"

namespace voxvis {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place: " + path.string());
    }
}

std::vector<std::uint8_t> encode_labels(std::span<const Label> labels) {
    std::vector<std::uint8_t> out(labels.size() * 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[2 * i] = static_cast<std::uint8_t>(labels[i] & 0xFFu);
        out[2 * i + 1] = static_cast<std::uint8_t>(labels[i] >> 8);
    }
    return out;
}

std::vector<Label> decode_labels(std::span<const std::uint8_t> bytes, std::size_t count) {
    if (bytes.size() != count * 2) {
        throw FormatError("label data has " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(count * 2));
    }
    std::vector<Label> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = static_cast<Label>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    }
    return out;
}

SemanticVoxelGrid load_labels(const std::filesystem::path& path, const VoxelToWorld& meta) {
    const auto bytes = read_file_bytes(path);
    try {
        return SemanticVoxelGrid(meta, decode_labels(bytes, meta.dims.count()));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_labels(const std::filesystem::path& path, const SemanticVoxelGrid& grid) {
    write_file_bytes(path, encode_labels(grid.labels()));
}

VoxelMask load_mask(const std::filesystem::path& path, const GridDims& dims) {
    try {
        return VoxelMask::from_bytes(dims, read_file_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_mask(const std::filesystem::path& path, const VoxelMask& mask) {
    write_file_bytes(path, mask.bytes());
}

}  // namespace voxvis

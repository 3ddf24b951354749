// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/calibration.hpp"

#include <array>
#include <charconv>
#include <map>
#include <string>
#include <vector>

#include "voxvis/error.hpp"
#include "voxvis/grid_io.hpp"

namespace voxvis {
namespace {

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
    while (!s.empty() && !not_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && !not_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

template <typename T>
std::vector<T> parse_numbers(std::string_view key, const std::vector<std::string_view>& tokens,
                             std::size_t expected) {
    if (tokens.size() != expected) {
        throw FormatError("calibration key '" + std::string(key) + "' needs " +
                          std::to_string(expected) + " values, got " +
                          std::to_string(tokens.size()));
    }
    std::vector<T> out(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        const auto* first = tokens[i].data();
        const auto* last = first + tokens[i].size();
        const auto [ptr, ec] = std::from_chars(first, last, out[i]);
        if (ec != std::errc{} || ptr != last) {
            throw FormatError("calibration key '" + std::string(key) + "': bad number '" +
                              std::string(tokens[i]) + "'");
        }
    }
    return out;
}

void append_number(std::string& out, double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    out.append(buf.data(), ptr);
}

void append_number(std::string& out, int value) { out += std::to_string(value); }

template <typename T>
void append_line(std::string& out, std::string_view key, std::initializer_list<T> values) {
    out += key;
    out += ':';
    for (const T v : values) {
        out += ' ';
        append_number(out, v);
    }
    out += '\n';
}

}  // namespace

CameraRig parse_calibration(std::string_view text) {
    std::map<std::string, std::vector<std::string_view>, std::less<>> entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw FormatError("calibration line " + std::to_string(line_no) + ": missing ':'");
        }
        std::string key(trim(line.substr(0, colon)));
        if (entries.contains(key)) {
            throw FormatError("calibration key '" + key + "' appears twice");
        }
        entries.emplace(std::move(key), split_ws(line.substr(colon + 1)));
    }

    static constexpr std::array<std::string_view, 6> kKeys = {"K",   "Rt",   "vox_origin",
                                                              "vox_size", "dims", "image_size"};
    for (const auto& [key, _] : entries) {
        bool known = false;
        for (const auto k : kKeys) {
            known = known || key == k;
        }
        if (!known) {
            throw FormatError("unknown calibration key '" + key + "'");
        }
    }
    const auto get = [&](std::string_view key) -> const std::vector<std::string_view>& {
        const auto it = entries.find(key);
        if (it == entries.end()) {
            throw FormatError("calibration key '" + std::string(key) + "' missing");
        }
        return it->second;
    };

    const auto k = parse_numbers<double>("K", get("K"), 9);
    const auto rt = parse_numbers<double>("Rt", get("Rt"), 12);
    const auto origin = parse_numbers<double>("vox_origin", get("vox_origin"), 3);
    const auto size = parse_numbers<double>("vox_size", get("vox_size"), 1);
    const auto dims = parse_numbers<int>("dims", get("dims"), 3);
    const auto image = parse_numbers<int>("image_size", get("image_size"), 2);

    if (k[1] != 0.0 || k[3] != 0.0 || k[6] != 0.0 || k[7] != 0.0 || k[8] != 1.0) {
        throw FormatError("K must be [fx 0 cx; 0 fy cy; 0 0 1]");
    }

    CameraRig rig;
    rig.intrinsics = {k[0], k[4], k[2], k[5], image[0], image[1]};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            rig.extrinsics.rotation(r, c) = rt[r * 4 + c];
        }
        rig.extrinsics.translation[r] = rt[r * 4 + 3];
    }
    rig.grid.placement.translation = {origin[0], origin[1], origin[2]};
    rig.grid.voxel_size = size[0];
    rig.grid.dims = {dims[0], dims[1], dims[2]};
    rig.validate();
    return rig;
}

std::string format_calibration(const CameraRig& rig) {
    if (!rig.grid.placement.rotation.isIdentity(0.0)) {
        throw ParameterError("calibration files cannot encode a rotated voxel grid");
    }
    const auto& in = rig.intrinsics;
    const auto& r = rig.extrinsics.rotation;
    const auto& t = rig.extrinsics.translation;
    const auto& o = rig.grid.origin();
    std::string out = "# voxvis calibration\n";
    append_line<double>(out, "K", {in.fx, 0.0, in.cx, 0.0, in.fy, in.cy, 0.0, 0.0, 1.0});
    append_line<double>(out, "Rt",
                        {r(0, 0), r(0, 1), r(0, 2), t[0], r(1, 0), r(1, 1), r(1, 2), t[1],
                         r(2, 0), r(2, 1), r(2, 2), t[2]});
    append_line<double>(out, "vox_origin", {o[0], o[1], o[2]});
    append_line<double>(out, "vox_size", {rig.grid.voxel_size});
    append_line<int>(out, "dims", {rig.grid.dims.x, rig.grid.dims.y, rig.grid.dims.z});
    append_line<int>(out, "image_size", {in.width, in.height});
    return out;
}

CameraRig load_calibration(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return parse_calibration(
            std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_calibration(const std::filesystem::path& path, const CameraRig& rig) {
    const std::string text = format_calibration(rig);
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

}  // namespace voxvis

// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxvis/voxel_mask.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <string>

#include "voxvis/error.hpp"

namespace voxvis {
namespace {

std::size_t packed_size(std::size_t bits) { return (bits + 7) / 8; }

// Mask of valid bits in the final byte (all ones when the count is a multiple of 8).
std::uint8_t tail_mask(std::size_t bits) {
    const auto used = static_cast<unsigned>(bits & 7u);
    return used == 0 ? std::uint8_t{0xFF} : static_cast<std::uint8_t>(0xFFu << (8 - used));
}

void require_same_dims(const VoxelMask& a, const VoxelMask& b, const char* what) {
    if (!(a.dims() == b.dims())) {
        throw ShapeError(std::string(what) + ": mask dimensions differ");
    }
}

template <typename Op>
VoxelMask combine(const VoxelMask& a, const VoxelMask& b, Op op) {
    std::vector<std::uint8_t> out(a.bytes().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(op(a.bytes()[i], b.bytes()[i]));
    }
    return VoxelMask::from_bytes(a.dims(), std::move(out));
}

}  // namespace

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> flags) {
    std::vector<std::uint8_t> out(packed_size(flags.size()), 0);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i] != 0) {
            out[i >> 3] |= static_cast<std::uint8_t>(0x80u >> (i & 7u));
        }
    }
    return out;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::size_t count) {
    if (bytes.size() < packed_size(count)) {
        throw FormatError("unpack_bits: " + std::to_string(bytes.size()) + " bytes cannot hold " +
                          std::to_string(count) + " bits");
    }
    std::vector<std::uint8_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = (bytes[i >> 3] >> (7 - (i & 7u))) & 1u;
    }
    return out;
}

VoxelMask::VoxelMask(const GridDims& dims, bool value)
    : dims_(dims), bytes_(packed_size(dims.count()), value ? 0xFF : 0x00) {
    if (value && !bytes_.empty()) {
        bytes_.back() &= tail_mask(dims.count());
    }
}

VoxelMask VoxelMask::from_bytes(const GridDims& dims, std::vector<std::uint8_t> bytes) {
    const std::size_t bits = dims.count();
    if (bytes.size() != packed_size(bits)) {
        throw FormatError("mask has " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(packed_size(bits)));
    }
    if (!bytes.empty() && (bytes.back() & static_cast<std::uint8_t>(~tail_mask(bits))) != 0) {
        throw FormatError("mask pad bits are not zero");
    }
    VoxelMask m;
    m.dims_ = dims;
    m.bytes_ = std::move(bytes);
    return m;
}

void VoxelMask::set_atomic(std::size_t linear) noexcept {
    std::atomic_ref<std::uint8_t> byte(bytes_[linear >> 3]);
    byte.fetch_or(static_cast<std::uint8_t>(0x80u >> (linear & 7u)), std::memory_order_relaxed);
}

std::size_t VoxelMask::count() const noexcept {
    std::size_t n = 0;
    for (const auto b : bytes_) {
        n += static_cast<std::size_t>(std::popcount(b));
    }
    return n;
}

bool VoxelMask::is_subset_of(const VoxelMask& other) const {
    require_same_dims(*this, other, "is_subset_of");
    for (std::size_t i = 0; i < bytes_.size(); ++i) {
        if ((bytes_[i] & static_cast<std::uint8_t>(~other.bytes_[i])) != 0) {
            return false;
        }
    }
    return true;
}

VoxelMask mask_union(const VoxelMask& a, const VoxelMask& b) {
    require_same_dims(a, b, "mask_union");
    return combine(a, b, [](std::uint8_t x, std::uint8_t y) { return x | y; });
}

VoxelMask mask_intersection(const VoxelMask& a, const VoxelMask& b) {
    require_same_dims(a, b, "mask_intersection");
    return combine(a, b, [](std::uint8_t x, std::uint8_t y) { return x & y; });
}

VoxelMask mask_difference(const VoxelMask& a, const VoxelMask& b) {
    require_same_dims(a, b, "mask_difference");
    return combine(a, b, [](std::uint8_t x, std::uint8_t y) { return x & ~y; });
}

VoxelMask mask_complement(const VoxelMask& a) {
    std::vector<std::uint8_t> out(a.bytes().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(~a.bytes()[i]);
    }
    if (!out.empty()) {
        out.back() &= tail_mask(a.size());
    }
    return VoxelMask::from_bytes(a.dims(), std::move(out));
}

VoxelMask dilate(const VoxelMask& mask, int radius) {
    if (radius < 0) {
        throw ParameterError("dilation radius must be >= 0");
    }
    if (radius == 0) {
        return mask;
    }
    const GridDims d = mask.dims();
    // Separable: a cube is the product of three 1-D intervals.
    std::vector<std::uint8_t> cur = unpack_bits(mask.bytes(), d.count());
    std::vector<std::uint8_t> next(cur.size());
    const int extent[3] = {d.x, d.y, d.z};
    const std::size_t stride[3] = {static_cast<std::size_t>(d.y) * d.z,
                                   static_cast<std::size_t>(d.z), 1};
    for (int axis = 0; axis < 3; ++axis) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] == 0) {
                continue;
            }
            const int coord = static_cast<int>((i / stride[axis]) % extent[axis]);
            const int lo = std::max(0, coord - radius);
            const int hi = std::min(extent[axis] - 1, coord + radius);
            const std::size_t base = i - static_cast<std::size_t>(coord) * stride[axis];
            for (int c = lo; c <= hi; ++c) {
                next[base + static_cast<std::size_t>(c) * stride[axis]] = 1;
            }
        }
        cur.swap(next);
    }
    return VoxelMask::from_bytes(d, pack_bits(cur));
}

}  // namespace voxvis

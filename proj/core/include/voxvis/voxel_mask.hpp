// SPDX-FileCopyrightText: 2026 The voxvis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "voxvis/camera_geometry.hpp"

namespace voxvis {

// Packs one byte per flag (nonzero = set) into MSB-first bits. Pad bits of
// the final byte are zero.
[[nodiscard]] std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> flags);
// Inverse of pack_bits for the first `count` bits.
[[nodiscard]] std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes,
                                                    std::size_t count);

// Bit-per-voxel boolean grid in canonical linear order, MSB-first in each byte.
class VoxelMask {
public:
    VoxelMask() = default;
    explicit VoxelMask(const GridDims& dims, bool value = false);

    // Adopts packed bytes. Throws FormatError on wrong length or nonzero pad bits.
    [[nodiscard]] static VoxelMask from_bytes(const GridDims& dims,
                                              std::vector<std::uint8_t> bytes);

    [[nodiscard]] const GridDims& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t size() const noexcept { return dims_.count(); }
    [[nodiscard]] const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    [[nodiscard]] bool test(std::size_t linear) const noexcept {
        return (bytes_[linear >> 3] & (0x80u >> (linear & 7u))) != 0;
    }
    [[nodiscard]] bool test(const Index3& i) const noexcept { return test(dims_.linear(i)); }

    void set(std::size_t linear, bool value = true) noexcept {
        const auto bit = static_cast<std::uint8_t>(0x80u >> (linear & 7u));
        if (value) {
            bytes_[linear >> 3] |= bit;
        } else {
            bytes_[linear >> 3] &= static_cast<std::uint8_t>(~bit);
        }
    }
    void set(const Index3& i, bool value = true) noexcept { set(dims_.linear(i), value); }

    // Thread-safe set; concurrent calls on any bits are fine.
    void set_atomic(std::size_t linear) noexcept;

    [[nodiscard]] std::size_t count() const noexcept;
    [[nodiscard]] bool none() const noexcept { return count() == 0; }
    [[nodiscard]] bool is_subset_of(const VoxelMask& other) const;

    friend bool operator==(const VoxelMask&, const VoxelMask&) = default;

private:
    GridDims dims_;
    std::vector<std::uint8_t> bytes_;
};

[[nodiscard]] VoxelMask mask_union(const VoxelMask& a, const VoxelMask& b);
[[nodiscard]] VoxelMask mask_intersection(const VoxelMask& a, const VoxelMask& b);
// a ∖ b
[[nodiscard]] VoxelMask mask_difference(const VoxelMask& a, const VoxelMask& b);
[[nodiscard]] VoxelMask mask_complement(const VoxelMask& a);
// Cubic (Chebyshev) dilation by `radius` voxels, clamped at the grid border.
[[nodiscard]] VoxelMask dilate(const VoxelMask& mask, int radius);

}  // namespace voxvis

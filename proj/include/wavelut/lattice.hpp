//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavelut/error.hpp"

namespace wavelut {

/// Position of a scalar inside a sampling axis: coords[index] <= v <= coords[index + 1].
struct CellLocation {
    int index = 0;
    float offset = 0.0f;
};

/// Monotone sampling coordinates for one lattice dimension. The first
/// coordinate is 0, the last is 1 and the sequence is strictly increasing.
class CoordinateAxis {
public:
    CoordinateAxis() = default;
    explicit CoordinateAxis(std::vector<float> coords);

    static CoordinateAxis uniform(int n);

    int size() const noexcept { return static_cast<int>(coords_.size()); }
    std::span<const float> coords() const noexcept { return coords_; }
    float operator[](int i) const noexcept { return coords_[static_cast<std::size_t>(i)]; }

    /// True when coords[k] == float(k) / float(n - 1) for every k.
    bool is_uniform() const noexcept { return uniform_; }

    /// 1 / (coords[k + 1] - coords[k]) for each cell k.
    std::span<const float> inv_widths() const noexcept { return inv_width_; }

    /// Locate v, which must already lie in [0, 1]. A value exactly on an
    /// interior coordinate resolves to the cell starting there with offset 0;
    /// v == 1 resolves to the last cell with offset 1.
    CellLocation locate(float v) const noexcept {
        const float* c = coords_.data();
        const int last_cell = size() - 2;
        int k;
        if (uniform_) {
            k = std::min(static_cast<int>(v * scale_), last_cell);
            if (v < c[k]) {
                --k;
            } else if (k < last_cell && v >= c[k + 1]) {
                ++k;
            }
        } else {
            k = static_cast<int>(std::upper_bound(c + 1, c + last_cell + 1, v) - c) - 1;
        }
        float offset = v >= 1.0f ? 1.0f : (v - c[k]) * inv_width_[static_cast<std::size_t>(k)];
        offset = std::min(offset, 1.0f);
        return {k, offset};
    }

    bool operator==(const CoordinateAxis& other) const noexcept { return coords_ == other.coords_; }

private:
    void finalize();

    std::vector<float> coords_;
    std::vector<float> inv_width_;
    float scale_ = 1.0f;
    bool uniform_ = false;
};

/// Clamp v into [0, 1]. NaN maps to 0. Returns true when v was modified.
inline bool clamp_unit(float& v) noexcept {
    if (v >= 0.0f && v <= 1.0f) {
        return false;
    }
    v = v > 1.0f ? 1.0f : 0.0f;
    return true;
}

/// locate_index with out-of-range handling: v is clamped into [0, 1] and
/// `clamped` reports whether that happened.
CellLocation locate_index(const CoordinateAxis& axis, float v, bool* clamped = nullptr);

/// Dense lattice of RGB triples over `Dims` sampling axes. Entry
/// (i0, i1, ..., i_{Dims-1}) is stored at
///   ((i_{Dims-1} * n + ...) * n + i1) * n + i0
/// so the first (red) index varies fastest; the three channels of an entry
/// are contiguous.
template <int Dims>
class Lattice {
public:
    static_assert(Dims == 3 || Dims == 4);
    static constexpr int kDims = Dims;
    /// Zero floats appended after the last entry so vector kernels can read
    /// one full register past the final entry.
    static constexpr std::size_t kPadding = 8;

    Lattice() = default;

    /// Zero-filled lattice on uniform axes.
    explicit Lattice(int n);

    Lattice(std::array<CoordinateAxis, Dims> axes, std::vector<float> values);

    int n() const noexcept { return n_; }
    std::size_t entry_count() const noexcept { return entries_; }
    std::size_t value_count() const noexcept { return entries_ * 3; }

    const std::array<CoordinateAxis, Dims>& axes() const noexcept { return axes_; }
    const CoordinateAxis& axis(int d) const noexcept { return axes_[static_cast<std::size_t>(d)]; }
    bool uniform_axes() const noexcept;

    std::span<const float> values() const noexcept { return {storage_.data(), value_count()}; }
    std::span<float> values() noexcept { return {storage_.data(), value_count()}; }

    /// Base of the padded storage; at least kPadding readable floats follow
    /// the last value.
    const float* data() const noexcept { return storage_.data(); }

    std::size_t entry_index(std::array<int, Dims> idx) const noexcept {
        std::size_t flat = 0;
        for (int d = Dims - 1; d >= 0; --d) {
            flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[d]);
        }
        return flat;
    }

    std::array<float, 3> entry(std::array<int, Dims> idx) const noexcept {
        const float* p = storage_.data() + entry_index(idx) * 3;
        return {p[0], p[1], p[2]};
    }

    void set_entry(std::array<int, Dims> idx, std::array<float, 3> rgb) noexcept {
        float* p = storage_.data() + entry_index(idx) * 3;
        p[0] = rgb[0];
        p[1] = rgb[1];
        p[2] = rgb[2];
    }

    /// Throws NumericError if any stored value is not finite.
    void check_finite() const;

    bool operator==(const Lattice& other) const noexcept {
        return n_ == other.n_ && axes_ == other.axes_ &&
               std::equal(values().begin(), values().end(), other.values().begin());
    }

private:
    int n_ = 0;
    std::size_t entries_ = 0;
    std::array<CoordinateAxis, Dims> axes_{};
    std::vector<float> storage_;
};

using Lattice3D = Lattice<3>;
using Lattice4D = Lattice<4>;

extern template class Lattice<3>;
extern template class Lattice<4>;

/// Identity lattices: the stored RGB at a grid point equals the point's
/// (R, G, B) coordinates; the prior axis of a 4D lattice has no effect.
Lattice3D make_identity_lattice3d(int n);
Lattice4D make_identity_lattice4d(int n);
Lattice4D make_identity_lattice4d(const std::array<CoordinateAxis, 4>& axes);

/// A 4D lattice whose output ignores the prior axis and equals `lut`.
Lattice4D extend_to_4d(const Lattice3D& lut, int prior_points);

/// How the video-path weights A and the wavelet-path weights B combine.
enum class MergeMode { mean, sum };

MergeMode parse_merge_mode(const std::string& text);
std::string to_string(MergeMode mode);

struct FusionWeights {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> merged;
};

/// Element-wise mean (a + b) / 2 or sum a + b.
FusionWeights merge_weights(std::vector<double> a, std::vector<double> b, MergeMode mode);

/// Convenience for callers that already hold the merged vector.
FusionWeights merged_only(std::vector<double> merged);

/// Soft-weighted combination sum_k merged[k] * bases[k], accumulated in
/// double and rounded once per value. Axes are copied from the first basis.
Lattice4D fuse_basis_luts(std::span<const Lattice4D> bases, const FusionWeights& weights);

}  // namespace wavelut

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>

#include "wavelut/frame.hpp"
#include "wavelut/lattice.hpp"

namespace wavelut {

class ThreadPool;

/// Per-call record of out-of-range inputs that were clamped into [0, 1].
struct ClampStats {
    std::size_t clamped_values = 0;
    std::size_t total_values = 0;

    ClampStats& operator+=(const ClampStats& o) noexcept {
        clamped_values += o.clamped_values;
        total_values += o.total_values;
        return *this;
    }
};

/// Map every pixel through the 3D lattice by trilinear interpolation.
FrameTensor trilinear_apply(const Lattice3D& lut, const FrameTensor& frame, ClampStats* stats = nullptr);

/// Map every pixel through the 4D lattice. The fourth coordinate of pixel
/// (y, x) is prior(y, x). Each output channel is the blend of the 16
/// surrounding entries with weights prod_d (offset_d or 1 - offset_d).
FrameTensor quadrilinear_apply(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior,
                               ClampStats* stats = nullptr);

/// Same as quadrilinear_apply, with rows split across the pool's workers.
/// Output is bitwise identical to the single-threaded call.
FrameTensor quadrilinear_apply(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior,
                               ThreadPool& pool, ClampStats* stats = nullptr);

/// Rows [row_begin, row_end) of quadrilinear_apply written into `out`, which
/// must already have the frame's shape.
std::size_t quadrilinear_apply_rows(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior,
                                    FrameTensor& out, int row_begin, int row_end);

/// Single-point queries, mainly for tools and tests.
std::array<float, 3> trilinear_sample(const Lattice3D& lut, float r, float g, float b);
std::array<float, 3> quadrilinear_sample(const Lattice4D& lut, float r, float g, float b, float e);

}  // namespace wavelut

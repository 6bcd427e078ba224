//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>

#include "wavelut/lattice.hpp"
#include "wavelut/simd/dispatch.hpp"

namespace wavelut::simd::detail {

/// Cell of one query: flat float offset of the base entry plus per-axis offsets.
template <int Dims>
struct Query {
    std::size_t base;
    std::array<float, Dims> offset;
};

/// Clamp and locate one query point. `point` holds Dims scalars; clamps are
/// counted into `clamped`.
template <int Dims>
inline Query<Dims> locate_point(const Lattice<Dims>& lut, std::array<float, Dims> point,
                                std::size_t& clamped) noexcept {
    Query<Dims> q{};
    std::size_t flat = 0;
    std::size_t stride = 1;
    const std::size_t n = static_cast<std::size_t>(lut.n());
    for (int d = 0; d < Dims; ++d) {
        float v = point[static_cast<std::size_t>(d)];
        clamped += clamp_unit(v) ? 1 : 0;
        const CellLocation loc = lut.axis(d).locate(v);
        q.offset[static_cast<std::size_t>(d)] = loc.offset;
        flat += static_cast<std::size_t>(loc.index) * stride;
        stride *= n;
    }
    q.base = flat * 3;
    return q;
}

std::size_t quadrilinear_scalar(const Lattice4D& lut, const float* rgb, const float* prior,
                                float* out, std::size_t count);
std::size_t trilinear_scalar(const Lattice3D& lut, const float* rgb, float* out, std::size_t count);
void weighted_sum_scalar(const float* const* sources, const double* weights,
                         std::size_t source_count, float* dst, std::size_t count);

#if WAVELUT_X86_64
std::size_t quadrilinear_avx2(const Lattice4D& lut, const float* rgb, const float* prior,
                              float* out, std::size_t count);
std::size_t trilinear_avx2(const Lattice3D& lut, const float* rgb, float* out, std::size_t count);
void weighted_sum_avx2(const float* const* sources, const double* weights,
                       std::size_t source_count, float* dst, std::size_t count);
#endif

#if WAVELUT_ARM64
std::size_t quadrilinear_neon(const Lattice4D& lut, const float* rgb, const float* prior,
                              float* out, std::size_t count);
std::size_t trilinear_neon(const Lattice3D& lut, const float* rgb, float* out, std::size_t count);
void weighted_sum_neon(const float* const* sources, const double* weights,
                       std::size_t source_count, float* dst, std::size_t count);
#endif

}  // namespace wavelut::simd::detail

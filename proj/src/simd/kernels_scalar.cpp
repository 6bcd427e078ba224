//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

// Scalar reference kernels. These evaluate the interpolation as the literal
// sum over all 2^Dims corners and serve as the baseline every vector variant
// is checked against.

#include "kernels_internal.hpp"

namespace wavelut::simd::detail {

namespace {

template <int Dims>
inline void blend_corners(const float* lut, const std::array<std::size_t, Dims>& stride,
                          const Query<Dims>& q, float* out) noexcept {
    float acc0 = 0.0f;
    float acc1 = 0.0f;
    float acc2 = 0.0f;
    for (unsigned corner = 0; corner < (1u << Dims); ++corner) {
        float w = 1.0f;
        std::size_t off = q.base;
        for (int d = 0; d < Dims; ++d) {
            const float o = q.offset[static_cast<std::size_t>(d)];
            if ((corner >> d) & 1u) {
                w *= o;
                off += stride[static_cast<std::size_t>(d)];
            } else {
                w *= 1.0f - o;
            }
        }
        acc0 += w * lut[off + 0];
        acc1 += w * lut[off + 1];
        acc2 += w * lut[off + 2];
    }
    out[0] = acc0;
    out[1] = acc1;
    out[2] = acc2;
}

template <int Dims>
std::array<std::size_t, Dims> float_strides(int n) noexcept {
    std::array<std::size_t, Dims> stride{};
    std::size_t s = 3;
    for (int d = 0; d < Dims; ++d) {
        stride[static_cast<std::size_t>(d)] = s;
        s *= static_cast<std::size_t>(n);
    }
    return stride;
}

}  // namespace

std::size_t quadrilinear_scalar(const Lattice4D& lut, const float* rgb, const float* prior,
                                float* out, std::size_t count) {
    const auto stride = float_strides<4>(lut.n());
    const float* table = lut.data();
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const float* px = rgb + 3 * i;
        const auto q = locate_point<4>(lut, {px[0], px[1], px[2], prior[i]}, clamped);
        blend_corners<4>(table, stride, q, out + 3 * i);
    }
    return clamped;
}

std::size_t trilinear_scalar(const Lattice3D& lut, const float* rgb, float* out, std::size_t count) {
    const auto stride = float_strides<3>(lut.n());
    const float* table = lut.data();
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const float* px = rgb + 3 * i;
        const auto q = locate_point<3>(lut, {px[0], px[1], px[2]}, clamped);
        blend_corners<3>(table, stride, q, out + 3 * i);
    }
    return clamped;
}

void weighted_sum_scalar(const float* const* sources, const double* weights,
                         std::size_t source_count, float* dst, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < source_count; ++k) {
            acc = acc + weights[k] * static_cast<double>(sources[k][i]);
        }
        dst[i] = static_cast<float>(acc);
    }
}

}  // namespace wavelut::simd::detail

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

// NEON kernels for AArch64, where NEON is part of the baseline ISA.
//
// Per (y, z, s) corner two overlapping 4-wide loads fetch [R0 G0 B0 R1] and
// [R1 G1 B1 R2]; lanes 0..2 of each accumulator hold the x and x+1 blends.

#include "kernels_internal.hpp"

#if WAVELUT_ARM64

#include <arm_neon.h>

namespace wavelut::simd::detail {

namespace {

inline void store_rgb(float* out, float32x4_t lo, float32x4_t hi, float o) noexcept {
    const float32x4_t blended = vfmaq_n_f32(vmulq_n_f32(lo, 1.0f - o), hi, o);
    out[0] = vgetq_lane_f32(blended, 0);
    out[1] = vgetq_lane_f32(blended, 1);
    out[2] = vgetq_lane_f32(blended, 2);
}

}  // namespace

std::size_t quadrilinear_neon(const Lattice4D& lut, const float* rgb, const float* prior,
                              float* out, std::size_t count) {
    const std::size_t n = static_cast<std::size_t>(lut.n());
    const std::size_t sy = 3 * n;
    const std::size_t sz = sy * n;
    const std::size_t ss = sz * n;
    const std::size_t corner[8] = {0, sy, sz, sy + sz, ss, ss + sy, ss + sz, ss + sy + sz};
    const float* table = lut.data();

    std::size_t clamped = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const float* px = rgb + 3 * i;
        const auto q = locate_point<4>(lut, {px[0], px[1], px[2], prior[i]}, clamped);
        const float og = q.offset[1];
        const float ob = q.offset[2];
        const float oe = q.offset[3];

        const float gb00 = (1.0f - og) * (1.0f - ob);
        const float gb10 = og * (1.0f - ob);
        const float gb01 = (1.0f - og) * ob;
        const float gb11 = og * ob;
        const float e0 = 1.0f - oe;
        const float w[8] = {gb00 * e0, gb10 * e0, gb01 * e0, gb11 * e0,
                            gb00 * oe, gb10 * oe, gb01 * oe, gb11 * oe};

        const float* base = table + q.base;
        float32x4_t lo = vmulq_n_f32(vld1q_f32(base + corner[0]), w[0]);
        float32x4_t hi = vmulq_n_f32(vld1q_f32(base + corner[0] + 3), w[0]);
        for (int k = 1; k < 8; ++k) {
            lo = vfmaq_n_f32(lo, vld1q_f32(base + corner[k]), w[k]);
            hi = vfmaq_n_f32(hi, vld1q_f32(base + corner[k] + 3), w[k]);
        }
        store_rgb(out + 3 * i, lo, hi, q.offset[0]);
    }
    return clamped;
}

std::size_t trilinear_neon(const Lattice3D& lut, const float* rgb, float* out, std::size_t count) {
    const std::size_t n = static_cast<std::size_t>(lut.n());
    const std::size_t sy = 3 * n;
    const std::size_t sz = sy * n;
    const std::size_t corner[4] = {0, sy, sz, sy + sz};
    const float* table = lut.data();

    std::size_t clamped = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const float* px = rgb + 3 * i;
        const auto q = locate_point<3>(lut, {px[0], px[1], px[2]}, clamped);
        const float og = q.offset[1];
        const float ob = q.offset[2];
        const float w[4] = {(1.0f - og) * (1.0f - ob), og * (1.0f - ob), (1.0f - og) * ob, og * ob};

        const float* base = table + q.base;
        float32x4_t lo = vmulq_n_f32(vld1q_f32(base), w[0]);
        float32x4_t hi = vmulq_n_f32(vld1q_f32(base + 3), w[0]);
        for (int k = 1; k < 4; ++k) {
            lo = vfmaq_n_f32(lo, vld1q_f32(base + corner[k]), w[k]);
            hi = vfmaq_n_f32(hi, vld1q_f32(base + corner[k] + 3), w[k]);
        }
        store_rgb(out + 3 * i, lo, hi, q.offset[0]);
    }
    return clamped;
}

void weighted_sum_neon(const float* const* sources, const double* weights,
                       std::size_t source_count, float* dst, std::size_t count) {
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t k = 0; k < source_count; ++k) {
            const float64x2_t v = vcvt_f64_f32(vld1_f32(sources[k] + i));
            acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(weights[k]), v));
        }
        vst1_f32(dst + i, vcvt_f32_f64(acc));
    }
    for (; i < count; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < source_count; ++k) {
            acc = acc + weights[k] * static_cast<double>(sources[k][i]);
        }
        dst[i] = static_cast<float>(acc);
    }
}

}  // namespace wavelut::simd::detail

#endif  // WAVELUT_ARM64

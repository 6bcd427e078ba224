//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

// AVX2/FMA kernels. Compiled with -mavx2 -mfma and only reached after the
// dispatcher has confirmed CPU support.
//
// Interpolation layout trick: the R index varies fastest and channels are
// interleaved, so entries x and x+1 of one (y, z, s) row occupy six
// consecutive floats [R0 G0 B0 R1 G1 B1]. One unaligned 8-wide load per
// (y, z, s) corner fetches both R-neighbours; the red-axis weights are
// applied once after the corner loop.

#include "kernels_internal.hpp"

#if WAVELUT_X86_64

#include <immintrin.h>

namespace wavelut::simd::detail {

namespace {

inline void store_rgb(float* out, __m256 blended, __m256i fold, __m128i mask3) noexcept {
    const __m256 folded = _mm256_permutevar8x32_ps(blended, fold);
    const __m128 sum = _mm256_castps256_ps128(_mm256_add_ps(blended, folded));
    _mm_maskstore_ps(out, mask3, sum);
}

inline __m256 red_weights(float o) noexcept {
    const float lo = 1.0f - o;
    return _mm256_setr_ps(lo, lo, lo, o, o, o, 0.0f, 0.0f);
}

// Eight-lane version of clamp_unit followed by CoordinateAxis::locate for a
// uniform axis. Uses the same float operations, so cells and offsets match
// the scalar search exactly.
inline std::size_t locate8(const CoordinateAxis& axis, __m256 v, __m256i& cell, __m256& offset) noexcept {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 inside = _mm256_and_ps(_mm256_cmp_ps(v, zero, _CMP_GE_OQ), _mm256_cmp_ps(v, one, _CMP_LE_OQ));
    const auto clamped = static_cast<std::size_t>(8 - __builtin_popcount(static_cast<unsigned>(_mm256_movemask_ps(inside))));
    v = _mm256_blendv_ps(_mm256_and_ps(_mm256_cmp_ps(v, one, _CMP_GT_OQ), one), v, inside);

    const float* c = axis.coords().data();
    const float* inv = axis.inv_widths().data();
    const __m256i last = _mm256_set1_epi32(axis.size() - 2);
    __m256i k = _mm256_min_epi32(_mm256_cvttps_epi32(_mm256_mul_ps(v, _mm256_set1_ps(static_cast<float>(axis.size() - 1)))), last);
    const __m256 below = _mm256_cmp_ps(v, _mm256_i32gather_ps(c, k, 4), _CMP_LT_OQ);
    const __m256 next = _mm256_i32gather_ps(c, _mm256_add_epi32(k, _mm256_set1_epi32(1)), 4);
    const __m256i can_step = _mm256_cmpgt_epi32(last, k);
    const __m256 above = _mm256_andnot_ps(below, _mm256_and_ps(_mm256_cmp_ps(v, next, _CMP_GE_OQ), _mm256_castsi256_ps(can_step)));
    k = _mm256_sub_epi32(_mm256_add_epi32(k, _mm256_castps_si256(below)), _mm256_castps_si256(above));

    const __m256 off = _mm256_mul_ps(_mm256_sub_ps(v, _mm256_i32gather_ps(c, k, 4)), _mm256_i32gather_ps(inv, k, 4));
    offset = _mm256_blendv_ps(_mm256_min_ps(off, one), one, _mm256_cmp_ps(v, one, _CMP_GE_OQ));
    cell = k;
    return clamped;
}

// Corner weights of the (G, B, E) cube; weight k sits at w[k * stride].
inline void blend_weighted(const float* table, const std::size_t* corner, std::size_t base, float orr,
                           const float* w, std::size_t stride, float* out, __m256i fold, __m128i mask3) noexcept {
    const float* p = table + base;
    __m256 acc[4];
    for (std::size_t k = 0; k < 4; ++k) {
        acc[k] = _mm256_fmadd_ps(_mm256_loadu_ps(p + corner[k + 4]), _mm256_broadcast_ss(w + (k + 4) * stride),
                                 _mm256_mul_ps(_mm256_loadu_ps(p + corner[k]), _mm256_broadcast_ss(w + k * stride)));
    }
    const __m256 sum = _mm256_add_ps(_mm256_add_ps(acc[0], acc[1]), _mm256_add_ps(acc[2], acc[3]));
    store_rgb(out, _mm256_mul_ps(sum, red_weights(orr)), fold, mask3);
}

inline void blend_pixel(const float* table, const std::size_t* corner, std::size_t base, float orr, float og, float ob,
                        float oe, float* out, __m256i fold, __m128i mask3) noexcept {
    const float gb00 = (1.0f - og) * (1.0f - ob);
    const float gb10 = og * (1.0f - ob);
    const float gb01 = (1.0f - og) * ob;
    const float gb11 = og * ob;
    const float e0 = 1.0f - oe;
    const float w[8] = {gb00 * e0, gb10 * e0, gb01 * e0, gb11 * e0, gb00 * oe, gb10 * oe, gb01 * oe, gb11 * oe};
    blend_weighted(table, corner, base, orr, w, 1, out, fold, mask3);
}

}  // namespace

std::size_t quadrilinear_avx2(const Lattice4D& lut, const float* rgb, const float* prior,
                              float* out, std::size_t count) {
    const std::size_t n = static_cast<std::size_t>(lut.n());
    const std::size_t sy = 3 * n;
    const std::size_t sz = sy * n;
    const std::size_t ss = sz * n;
    const std::size_t corner[8] = {0, sy, sz, sy + sz, ss, ss + sy, ss + sz, ss + sy + sz};
    const float* table = lut.data();

    const __m256i fold = _mm256_setr_epi32(3, 4, 5, 3, 4, 5, 6, 7);
    const __m128i mask3 = _mm_setr_epi32(-1, -1, -1, 0);

    std::size_t clamped = 0;
    std::size_t i = 0;
    bool uniform = true;
    for (int d = 0; d < 4; ++d) {
        uniform = uniform && lut.axis(d).is_uniform();
    }
    if (uniform) {
        const __m256i lane3 = _mm256_setr_epi32(0, 3, 6, 9, 12, 15, 18, 21);
        const __m256i n_vec = _mm256_set1_epi32(static_cast<int>(n));
        alignas(32) int base[8];
        alignas(32) float red[8];
        alignas(32) float w[8][8];
        for (; i + 8 <= count; i += 8) {
            const float* px = rgb + 3 * i;
            __m256i cell[4];
            __m256 o[4];
            clamped += locate8(lut.axis(0), _mm256_i32gather_ps(px, lane3, 4), cell[0], o[0]);
            clamped += locate8(lut.axis(1), _mm256_i32gather_ps(px + 1, lane3, 4), cell[1], o[1]);
            clamped += locate8(lut.axis(2), _mm256_i32gather_ps(px + 2, lane3, 4), cell[2], o[2]);
            clamped += locate8(lut.axis(3), _mm256_loadu_ps(prior + i), cell[3], o[3]);
            __m256i flat = cell[3];
            for (int d = 2; d >= 0; --d) {
                flat = _mm256_add_epi32(_mm256_mullo_epi32(flat, n_vec), cell[d]);
            }
            _mm256_store_si256(reinterpret_cast<__m256i*>(base), _mm256_mullo_epi32(flat, _mm256_set1_epi32(3)));
            _mm256_store_ps(red, o[0]);
            const __m256 one = _mm256_set1_ps(1.0f);
            const __m256 g1 = _mm256_sub_ps(one, o[1]);
            const __m256 b1 = _mm256_sub_ps(one, o[2]);
            const __m256 e1 = _mm256_sub_ps(one, o[3]);
            const __m256 gb[4] = {_mm256_mul_ps(g1, b1), _mm256_mul_ps(o[1], b1), _mm256_mul_ps(g1, o[2]),
                                  _mm256_mul_ps(o[1], o[2])};
            for (int k = 0; k < 4; ++k) {
                _mm256_store_ps(w[k], _mm256_mul_ps(gb[k], e1));
                _mm256_store_ps(w[k + 4], _mm256_mul_ps(gb[k], o[3]));
            }
            for (int j = 0; j < 8; ++j) {
                blend_weighted(table, corner, static_cast<std::size_t>(base[j]), red[j], &w[0][j], 8,
                               out + 3 * (i + static_cast<std::size_t>(j)), fold, mask3);
            }
        }
    }
    for (; i < count; ++i) {
        const float* px = rgb + 3 * i;
        const auto q = locate_point<4>(lut, {px[0], px[1], px[2], prior[i]}, clamped);
        blend_pixel(table, corner, q.base, q.offset[0], q.offset[1], q.offset[2], q.offset[3], out + 3 * i, fold,
                    mask3);
    }
    return clamped;
}

std::size_t trilinear_avx2(const Lattice3D& lut, const float* rgb, float* out, std::size_t count) {
    const std::size_t n = static_cast<std::size_t>(lut.n());
    const std::size_t sy = 3 * n;
    const std::size_t sz = sy * n;
    const float* table = lut.data();

    const __m256i fold = _mm256_setr_epi32(3, 4, 5, 3, 4, 5, 6, 7);
    const __m128i mask3 = _mm_setr_epi32(-1, -1, -1, 0);

    std::size_t clamped = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const float* px = rgb + 3 * i;
        const auto q = locate_point<3>(lut, {px[0], px[1], px[2]}, clamped);
        const float og = q.offset[1];
        const float ob = q.offset[2];

        const float* base = table + q.base;
        __m256 acc = _mm256_mul_ps(_mm256_loadu_ps(base), _mm256_set1_ps((1.0f - og) * (1.0f - ob)));
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(base + sy), _mm256_set1_ps(og * (1.0f - ob)), acc);
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(base + sz), _mm256_set1_ps((1.0f - og) * ob), acc);
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(base + sy + sz), _mm256_set1_ps(og * ob), acc);
        store_rgb(out + 3 * i, _mm256_mul_ps(acc, red_weights(q.offset[0])), fold, mask3);
    }
    return clamped;
}

void weighted_sum_avx2(const float* const* sources, const double* weights,
                       std::size_t source_count, float* dst, std::size_t count) {
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < source_count; ++k) {
            const __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(sources[k] + i));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(weights[k]), v));
        }
        _mm_storeu_ps(dst + i, _mm256_cvtpd_ps(acc));
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

#endif  // WAVELUT_X86_64

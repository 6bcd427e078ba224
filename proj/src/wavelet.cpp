//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/wavelet.hpp"

#include <algorithm>

namespace wavelut {

template <typename T>
WaveletBandsT<T> dwt2(const Image<T>& frame) {
    if (frame.empty()) {
        throw ShapeError("dwt2: empty frame");
    }
    const int h = frame.height();
    const int w = frame.width();
    const int ch = frame.channels();
    const int bh = (h + 1) / 2;
    const int bw = (w + 1) / 2;

    WaveletBandsT<T> out;
    out.ll = Image<T>(bh, bw, ch);
    out.lh = Image<T>(bh, bw, ch);
    out.hl = Image<T>(bh, bw, ch);
    out.hh = Image<T>(bh, bw, ch);
    out.source_height = h;
    out.source_width = w;
    out.padded = (h % 2) != 0 || (w % 2) != 0;

    for (int by = 0; by < bh; ++by) {
        const T* top = frame.row(2 * by);
        const T* bottom = frame.row(std::min(2 * by + 1, h - 1));
        for (int bx = 0; bx < bw; ++bx) {
            const int x0 = 2 * bx * ch;
            const int x1 = std::min(2 * bx + 1, w - 1) * ch;
            for (int c = 0; c < ch; ++c) {
                const T a = top[x0 + c];
                const T b = top[x1 + c];
                const T cc = bottom[x0 + c];
                const T d = bottom[x1 + c];
                // Pairwise sums keep a constant block exact.
                const T top_sum = a + b;
                const T bottom_sum = cc + d;
                const T top_diff = a - b;
                const T bottom_diff = cc - d;
                out.ll.at(by, bx, c) = (top_sum + bottom_sum) / T(4);
                out.lh.at(by, bx, c) = (top_diff + bottom_diff) / T(4);
                out.hl.at(by, bx, c) = (top_sum - bottom_sum) / T(4);
                out.hh.at(by, bx, c) = (top_diff - bottom_diff) / T(4);
            }
        }
    }
    return out;
}

template <typename T>
Image<T> idwt2(const WaveletBandsT<T>& bands) {
    const auto& ll = bands.ll;
    if (!ll.same_shape(bands.lh) || !ll.same_shape(bands.hl) || !ll.same_shape(bands.hh)) {
        throw ShapeError("idwt2: band shapes differ");
    }
    if (ll.empty()) {
        throw ShapeError("idwt2: empty bands");
    }
    const int bh = ll.height();
    const int bw = ll.width();
    const int ch = ll.channels();
    int h = 2 * bh;
    int w = 2 * bw;
    if (bands.source_height > 0 || bands.source_width > 0) {
        if ((bands.source_height + 1) / 2 != bh || (bands.source_width + 1) / 2 != bw) {
            throw ShapeError("idwt2: recorded source size does not match the bands");
        }
        h = bands.source_height;
        w = bands.source_width;
    }

    Image<T> out(h, w, ch);
    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            for (int c = 0; c < ch; ++c) {
                const T s = ll.at(by, bx, c);
                const T p = bands.lh.at(by, bx, c);
                const T q = bands.hl.at(by, bx, c);
                const T r = bands.hh.at(by, bx, c);
                const T v[2][2] = {{s + p + q + r, s - p + q - r}, {s + p - q - r, s - p - q + r}};
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const int y = 2 * by + dy;
                        const int x = 2 * bx + dx;
                        if (y < h && x < w) {
                            out.at(y, x, c) = v[dy][dx];
                        }
                    }
                }
            }
        }
    }
    return out;
}

template WaveletBandsT<float> dwt2(const Image<float>&);
template WaveletBandsT<double> dwt2(const Image<double>&);
template Image<float> idwt2(const WaveletBandsT<float>&);
template Image<double> idwt2(const WaveletBandsT<double>&);

}  // namespace wavelut

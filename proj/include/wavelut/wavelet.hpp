//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "wavelut/frame.hpp"

namespace wavelut {

/// One-level Haar decomposition with averaging normalization. For the 2x2
/// block a b / c d:
///
///   ll = (a + b + c + d) / 4     lh = (a - b + c - d) / 4
///   hl = (a + b - c - d) / 4     hh = (a - b - c + d) / 4
///
/// Bands are ceil(H/2) x ceil(W/2) x C. Odd inputs are padded by repeating
/// the last row/column; `source_height`/`source_width` remember the input
/// size so idwt2 can crop the padding away.
template <typename T>
struct WaveletBandsT {
    Image<T> ll, lh, hl, hh;
    int source_height = 0;
    int source_width = 0;
    bool padded = false;
};

using WaveletBands = WaveletBandsT<float>;

template <typename T>
WaveletBandsT<T> dwt2(const Image<T>& frame);

/// Haar synthesis: a = ll+lh+hl+hh, b = ll-lh+hl-hh, c = ll+lh-hl-hh,
/// d = ll-lh-hl+hh. Bands without a recorded source size reconstruct the
/// full 2h x 2w frame.
template <typename T>
Image<T> idwt2(const WaveletBandsT<T>& bands);

extern template WaveletBandsT<float> dwt2(const Image<float>&);
extern template WaveletBandsT<double> dwt2(const Image<double>&);
extern template Image<float> idwt2(const WaveletBandsT<float>&);
extern template Image<double> idwt2(const WaveletBandsT<double>&);

}  // namespace wavelut

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <complex>
#include <vector>

namespace wavelut {

/// Unnormalized forward 2D DFT of a real h x w plane (row-major):
/// F[u, v] = sum_{y, x} p[y, x] exp(-2 pi i (u y / h + v x / w)).
std::vector<std::complex<double>> dft2(const std::vector<double>& plane, int h, int w);

/// Real part of the unnormalized inverse transform,
/// out[y, x] = Re sum_{u, v} G[u, v] exp(+2 pi i (u y / h + v x / w)).
/// This is the adjoint of dft2 seen as a map from real planes to complex
/// spectra, so it carries spectrum gradients back to pixels.
std::vector<double> dft2_adjoint(const std::vector<std::complex<double>>& spectrum, int h, int w);

}  // namespace wavelut

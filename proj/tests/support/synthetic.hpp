//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

// Synthetic clips with natural-looking structure: smooth luminance fields
// with correlated colour channels, and a pointwise low-light degradation.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "wavelut/frame.hpp"

namespace wavelut::synthetic {

/// Smooth random frame: a sum of a few low-frequency waves sets the
/// luminance, and each channel is that luminance scaled by a per-frame tint
/// plus a little independent texture.
inline FrameTensor natural_frame(std::mt19937_64& rng, int h, int w) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    struct Wave {
        double fy, fx, phase, amp;
    };
    std::vector<Wave> waves(4);
    for (auto& wv : waves) {
        wv = {u(rng) * 4.0 / h, u(rng) * 4.0 / w, u(rng) * 6.283185307179586, 0.1 + 0.2 * u(rng)};
    }
    double tint[3];
    for (double& t : tint) {
        t = 0.8 + 0.4 * u(rng);
    }
    const double base = 0.2 + 0.5 * u(rng);
    std::normal_distribution<double> noise(0.0, 0.02);
    FrameTensor f(h, w, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double lum = base;
            for (const auto& wv : waves) {
                lum += wv.amp * std::sin(6.283185307179586 * (wv.fy * y + wv.fx * x) + wv.phase);
            }
            for (int c = 0; c < 3; ++c) {
                const double v = lum * tint[c] + noise(rng);
                f.at(y, x, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        }
    }
    return f;
}

/// Low-light degradation: gain * x^gamma per channel.
inline FrameTensor darken(const FrameTensor& f, double gamma = 2.2, double gain = 0.5) {
    FrameTensor out(f.height(), f.width(), f.channels());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.values()[i] = static_cast<float>(gain * std::pow(static_cast<double>(f.values()[i]), gamma));
    }
    return out;
}

}  // namespace wavelut::synthetic

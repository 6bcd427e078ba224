//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wavelut/frame.hpp"

namespace wavelut {

/// 10 log10(peak^2 / MSE) over every element; +infinity when MSE is 0.
double psnr(const FrameTensor& a, const FrameTensor& b, double peak = 1.0);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// Normalized 1D Gaussian taps; the 2D window is their outer product.
std::array<double, kSsimWindow> ssim_taps();

/// Mean local SSIM over every window position that fits inside the frame
/// (no padding), per channel, averaged over channels. C1 = (0.01 peak)^2,
/// C2 = (0.03 peak)^2. Frames smaller than the window are rejected.
double ssim(const FrameTensor& a, const FrameTensor& b, double peak = 1.0);

/// Separable "valid" Gaussian filtering of an h x w plane; the result is
/// (h - 10) x (w - 10).
std::vector<double> ssim_filter(const std::vector<double>& plane, int h, int w);

struct MetricReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::vector<std::pair<double, double>> per_frame;

    std::string to_csv() const;
    std::string to_json() const;
};

MetricReport evaluate(const std::vector<FrameTensor>& a, const std::vector<FrameTensor>& b, double peak = 1.0);

}  // namespace wavelut

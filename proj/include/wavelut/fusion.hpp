//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "wavelut/frame.hpp"
#include "wavelut/prior.hpp"
#include "wavelut/wavelet.hpp"

namespace wavelut {

class ThreadPool;

/// Centered cosine (Pearson correlation) of two maps, in [-1, 1]. Returns 0
/// when either map is constant.
double similarity(const PriorMap& a, const PriorMap& b);

enum class WeightMapping {
    linear,   // w = (s + 1) / 2
    softmax,  // w = 1 / (1 + exp(-2 s / T))
};

WeightMapping parse_weight_mapping(const std::string& text);
std::string to_string(WeightMapping m);

struct FusionOptions {
    WeightMapping mapping = WeightMapping::linear;
    double temperature = 1.0;
    /// Exponential smoothing factor a in [0, 1): w_t = a * w_{t-1} + (1 - a) * raw_t.
    /// 0 disables smoothing and keeps frames independent.
    double smoothing = 0.0;

    void validate() const;
};

double similarity_to_weight(double s, const FusionOptions& opt = {});

struct FusedPrior {
    PriorMap fused;
    double weight = 0.0;
    std::size_t clamp_count = 0;
};

/// fused = clamp(w * lighting + (1 - w) * intensity, 0, 1) with w from the
/// similarity of the two maps.
FusedPrior dynamic_fuse(const PriorMap& intensity, const PriorMap& lighting, const FusionOptions& opt = {});

/// The blend step alone, for a weight chosen by the caller.
FusedPrior blend_priors(const PriorMap& intensity, const PriorMap& lighting, double weight);

struct FusionReport {
    std::vector<double> per_frame_weight;
    std::vector<std::size_t> per_frame_clamp;
    std::size_t clamp_count = 0;

    std::string to_csv() const;
    void save_csv(const std::filesystem::path& path) const;
};

struct FusedSequence {
    std::vector<PriorMap> fused;
    FusionReport report;
};

FusedSequence fuse_sequence(const std::vector<PriorMap>& intensities, const std::vector<PriorMap>& lightings,
                            const FusionOptions& opt = {}, ThreadPool* pool = nullptr);

/// The per-frame prior chain: dwt2, lighting prior from LL, intensity map
/// and their dynamic fusion.
struct PriorOptions {
    double intensity_gamma = 1.0;
    FusionOptions fusion;
};

struct FramePrior {
    FrameTensor ll;
    PriorMap intensity;
    PriorMap lighting;
    FusedPrior fused;
};

FramePrior frame_prior(const FrameTensor& frame, const PriorOptions& opt = {});

}  // namespace wavelut

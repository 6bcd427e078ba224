//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "wavelut/frame.hpp"
#include "wavelut/lattice.hpp"

namespace wavelut {

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// Per-pixel luma 0.299 R + 0.587 G + 0.114 B, raised to `gamma`, clamped
/// into [0, 1].
PriorMap intensity_map(const FrameTensor& frame, double gamma = 1.0);

/// Luma of the LL band, bilinearly upsampled to target_h x target_w and
/// clamped into [0, 1]. Sample centers are aligned: target pixel t reads
/// source position (t + 0.5) * src / dst - 0.5, clamped to the source edge.
PriorMap lighting_prior(const FrameTensor& ll, int target_h, int target_w);

/// Pooled statistics of a 3-channel tensor. The tensor is split into a
/// 2 x 4 grid of cells (rows x columns); in each cell the signals R, G, B
/// and luma are summarised by mean, population std, min and max. Feature
/// index is ((cell * 4) + signal) * 4 + stat, cell = row * 4 + column.
inline constexpr int kPoolRows = 2;
inline constexpr int kPoolCols = 4;
inline constexpr int kPoolSignals = 4;
inline constexpr int kPoolStats = 4;
inline constexpr int kFeatureLength = kPoolRows * kPoolCols * kPoolSignals * kPoolStats;

std::vector<double> pooled_features(const FrameTensor& tensor);

/// Linear map from pooled features to one weight per basis LUT:
/// out = weight * features + bias, weight stored row-major (outputs x 128).
struct LinearHead {
    int outputs = 0;
    std::vector<float> weight;
    std::vector<float> bias;

    std::vector<double> apply(const std::vector<double>& features) const;
};

struct PredictorParams {
    LinearHead video;    // frame features -> A
    LinearHead wavelet;  // LL features -> B

    int outputs() const noexcept { return video.outputs; }
    void validate() const;

    /// Zero weights with the given biases on both paths.
    static PredictorParams constant(const std::vector<float>& bias);
};

FusionWeights predict_fusion_weights(const FrameTensor& frame, const FrameTensor& ll,
                                     const PredictorParams& params, MergeMode mode = MergeMode::mean);

/// Parameter file: `json_path` holds an index
///   {"format": "wavelut-predictor", "version": 1, "feature_length": 128,
///    "outputs": K, "tensors": [{"name", "path", "shape", "offset"}, ...]}
/// whose tensors are little-endian f32 blocks at byte `offset` of `path`
/// (relative to the index). Tensor names: video.weight, video.bias,
/// wavelet.weight, wavelet.bias.
void save_predictor(const PredictorParams& params, const std::filesystem::path& json_path);
PredictorParams load_predictor(const std::filesystem::path& json_path);

/// Built-in basis set: basis 0 is the identity; the others brighten dark
/// pixels by an amount that grows as the prior E falls.
std::vector<Lattice4D> make_default_bases(int n, int count = 3);

}  // namespace wavelut

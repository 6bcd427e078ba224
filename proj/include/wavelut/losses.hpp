//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "wavelut/frame.hpp"
#include "wavelut/lattice.hpp"

namespace wavelut {

enum class EmbeddingSource { image, text };

struct EmbeddingVector {
    std::string name;
    std::vector<float> values;
    EmbeddingSource source = EmbeddingSource::image;
};

/// Cosine of two embeddings, computed in double.
double clip_similarity(const EmbeddingVector& img, const EmbeddingVector& txt);

/// |sim_r1 - sim_h1| + |sim_r2 - sim_h2| before clamping; lies in [0, 4].
double loss_parameter_raw(double sim_r1, double sim_h1, double sim_r2, double sim_h2);

/// The raw value clamped into [0, 1] so it can weight a convex combination.
double loss_parameter(double sim_r1, double sim_h1, double sim_r2, double sim_h2);

/// varpi from a reference image embedding, an enhanced image embedding and
/// the two prompt embeddings.
double varpi_from_embeddings(const EmbeddingVector& reference, const EmbeddingVector& enhanced,
                             const EmbeddingVector& prompt1, const EmbeddingVector& prompt2);

/// Embedding file: a sequence of records, each
///   u32 little-endian header length L, L bytes of JSON
///   {"name": ..., "length": K, "source": "image" | "text"},
///   K little-endian f32 values.
std::vector<EmbeddingVector> load_embeddings(const std::filesystem::path& path);
void save_embeddings(const std::vector<EmbeddingVector>& vectors, const std::filesystem::path& path);
const EmbeddingVector& find_embedding(const std::vector<EmbeddingVector>& vectors, const std::string& name);

struct LossConstants {
    double beta_s = 1e-4;
    double beta_m = 10.0;
    double vartheta = 0.1;
    double epsilon = 1e-6;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Argument in (-pi, pi]; a negative real value with a -0 imaginary part
/// maps to +pi rather than -pi.
double principal_arg(std::complex<double> z);

/// Modulus below which the phase of a frequency bin is taken as 0.
inline constexpr double kPhaseFloor = 1e-12;

/// varpi * mean|amp_H - amp_R| + (1 - varpi) * mean|pha_H - pha_R|, with
/// means over every frequency bin of every channel of one frame.
double fourier_perceptual_loss(const FrameTensor& vh, const FrameTensor& vr, double varpi);

/// Per-frame Fourier losses averaged over a clip.
double fourier_perceptual_loss(const std::vector<FrameTensor>& vh, const std::vector<FrameTensor>& vr,
                               double varpi);

/// mean sqrt((vh - vr)^2 + eps^2) over every element.
double charbonnier_loss(const FrameTensor& vh, const FrameTensor& vr, double epsilon);

/// Charbonnier term plus vartheta * (1 - SSIM). The SSIM term needs frames of
/// at least 11 x 11 unless vartheta is 0, in which case it is skipped.
double content_loss(const FrameTensor& vh, const FrameTensor& vr, const LossConstants& k = {});

/// Squared forward differences of every stored channel along all four
/// lattice axes, plus the squared norm of the merged basis weights.
double smooth_loss(const Lattice4D& lut, const FusionWeights& w);

/// Sum over all four axes and all channels of max(0, C_i - C_{i+1}).
double monotone_loss(const Lattice4D& lut);

struct LossBundle {
    double content = 0.0;
    double perceptual = 0.0;
    double smooth = 0.0;
    double monotone = 0.0;
    double total = 0.0;
    double varpi = 0.0;
    LossConstants constants;
};

/// total = content + perceptual + beta_s * smooth + beta_m * monotone.
LossBundle total_loss(double content, double perceptual, double smooth, double monotone, double varpi = 0.0,
                      const LossConstants& k = {});

}  // namespace wavelut

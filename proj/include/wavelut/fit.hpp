//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wavelut/frame.hpp"
#include "wavelut/lattice.hpp"
#include "wavelut/losses.hpp"
#include "wavelut/prior.hpp"

namespace wavelut {

class ThreadPool;

/// One training pair: the input frame, its lookup prior and the target.
struct FitSample {
    FrameTensor input;
    PriorMap prior;
    FrameTensor reference;
};

/// Which parts of the total loss enter the objective. Per-frame terms are
/// averaged over the batch; the lattice regularizers are added once.
struct ObjectiveTerms {
    bool charbonnier = true;
    bool ssim = false;
    bool fourier = false;
    bool smooth = false;
    bool monotone = false;

    static ObjectiveTerms all() { return {true, true, true, true, true}; }
};

struct ObjectiveOptions {
    LossConstants constants;
    double varpi = 1.0;
    ObjectiveTerms terms;
};

struct GradientResult {
    double loss = 0.0;
    LossBundle parts;
    /// d loss / d value, in the layout of Lattice4D::values().
    std::vector<double> gradient;
};

/// Objective and its gradient with respect to every stored lattice value,
/// evaluated in double precision at `values` (layout and axes from
/// `layout`). Pixel contributions reach the 16 entries around each query
/// weighted by their quadrilinear weights; untouched entries get 0.
///
/// Backward rules: Charbonnier is differentiated directly; SSIM through the
/// window statistics (adjoint of the Gaussian filter); the Fourier term
/// through the adjoint DFT, with amplitude derivative F/|F| and phase
/// derivative iF/|F|^2 per bin, both zero below the phase floor.
GradientResult lattice_gradients(const Lattice4D& layout, std::span<const double> values,
                                 const std::vector<FitSample>& batch, const ObjectiveOptions& opt,
                                 ThreadPool* pool = nullptr);

GradientResult lattice_gradients(const Lattice4D& lut, const std::vector<FitSample>& batch,
                                 const ObjectiveOptions& opt = {}, ThreadPool* pool = nullptr);

/// Objective value only.
double lattice_objective(const Lattice4D& layout, std::span<const double> values,
                         const std::vector<FitSample>& batch, const ObjectiveOptions& opt,
                         ThreadPool* pool = nullptr);

enum class OptimizerKind { gd, momentum, adam };

OptimizerKind parse_optimizer(const std::string& text);
std::string to_string(OptimizerKind kind);

struct FitConfig {
    double learning_rate = 4e-4;
    int steps = 1000;
    int batch_frames = 8;
    int crop = 256;
    LossConstants constants;
    /// Amplitude/phase balance of the Fourier term; normally derived from
    /// embeddings, 1 (amplitude only) when none are supplied.
    double varpi = 1.0;
    bool use_ssim = true;
    bool use_fourier = true;
    OptimizerKind optimizer = OptimizerKind::momentum;
    double momentum = 0.9;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Full-data evaluations happen at step 0, every `checkpoint_every`
    /// steps and after the last step.
    int checkpoint_every = 50;
    /// After each update, project the values back onto lattices that are
    /// non-decreasing along every axis: an isotonic regression per axis line,
    /// first weighted by how much data reaches each entry, then unweighted.
    /// Keeps monotone_loss at 0 for a monotone init.
    bool monotone_repair = true;
    std::uint64_t seed = 0;

    void validate() const;
    ObjectiveOptions objective() const;
};

struct FitHistoryRow {
    int step = 0;
    double batch_loss = 0.0;
    double checkpoint_loss = 0.0;  // NaN when no checkpoint ran at this step
    double best_loss = 0.0;
};

struct FitResult {
    Lattice4D lattice;
    std::vector<FitHistoryRow> history;
    double initial_loss = 0.0;
    double best_loss = 0.0;
    int best_step = 0;
};

/// Raised when the loss stops being finite. Holds the last checkpointed
/// lattice and the step it came from.
class FitDivergence : public OptimizationError {
public:
    FitDivergence(const std::string& what, int last_finite_step, Lattice4D last_finite)
        : OptimizationError(what, last_finite_step), last_finite_(std::move(last_finite)) {}

    const Lattice4D& last_finite_lattice() const noexcept { return last_finite_; }

private:
    Lattice4D last_finite_;
};

/// Minimise the total loss over the lattice values. Each step draws
/// `batch_frames` samples (shuffled epochs) with one random crop each. The
/// returned lattice is the best full-data checkpoint, so its loss is never
/// above the initial one. Deterministic for a given seed.
FitResult fit_lattice(const Lattice4D& init, const std::vector<FitSample>& data, const FitConfig& cfg,
                      ThreadPool* pool = nullptr);

std::string history_csv(const std::vector<FitHistoryRow>& history);

/// Fit predictor heads by ridge regression. For each pair, the merged basis
/// weights that best reproduce the reference (least squares over the basis
/// outputs) become the regression target of both heads.
struct PredictorFitPair {
    FrameTensor input;
    FrameTensor reference;
};

PredictorParams fit_predictor(const std::vector<Lattice4D>& bases, const std::vector<PredictorFitPair>& pairs,
                              MergeMode mode = MergeMode::mean, double ridge = 1e-2);

}  // namespace wavelut

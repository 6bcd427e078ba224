//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavelut/config.hpp"
#include "wavelut/fusion.hpp"
#include "wavelut/image_io.hpp"
#include "wavelut/interpolate.hpp"
#include "wavelut/lattice.hpp"
#include "wavelut/prior.hpp"

namespace wavelut {

class ThreadPool;

/// Loaded lattices and parameters, ready to run.
struct EnhanceModel {
    /// One lattice per basis; a single entry with no predictor is applied as is.
    std::vector<Lattice4D> bases;
    std::optional<PredictorParams> predictor;
    MergeMode merge = MergeMode::mean;
    PriorOptions prior;

    /// Throws ConfigError if the bases disagree in size or axes, or the
    /// predictor output count differs from the basis count.
    void validate() const;

    /// Built-in bases with equal weights.
    static EnhanceModel builtin(int n = 17, int basis_count = 3);
    /// A single lattice used for every frame.
    static EnhanceModel single(Lattice4D lut);
};

/// Load every file the config names. I/O problems raise IoError, malformed
/// files FormatError, inconsistent sizes ConfigError.
EnhanceModel load_model(const EnhanceConfig& cfg);

/// Post-mapping refinement applied to each output frame; the default does
/// nothing.
using DenoiseHook = std::function<void(FrameTensor&)>;

struct EnhanceResult {
    ClipSequence clip;
    FusionReport report;
    /// Merged basis weights used for each frame.
    std::vector<std::vector<double>> weights;
    ClampStats clamps;
};

/// Per frame: dwt2, lighting prior from LL, intensity map, dynamic fusion
/// (across the clip when temporal smoothing is on), predicted basis
/// weights, basis fusion and the 4D lookup, then the denoise hook. Frames
/// run in parallel on `pool`; the output is bitwise identical for any
/// worker count. Failures are rethrown as StageError naming the stage, with
/// the original exception nested.
EnhanceResult enhance_clip(const ClipSequence& clip, const EnhanceModel& model, ThreadPool* pool = nullptr,
                           const DenoiseHook& denoise = {});

struct BenchmarkReport {
    int width = 0;
    int height = 0;
    int frames = 0;
    int threads = 0;
    int repetitions = 0;
    std::string isa;
    double pipeline_ms_per_frame = 0.0;
    double pipeline_fps = 0.0;
    double apply_ms_per_frame = 0.0;
    double apply_fps = 0.0;

    std::string to_text() const;
    std::string to_json() const;
};

/// Times enhance_clip and quadrilinear_apply alone on a random clip made
/// from `seed`. Each is repeated `repetitions` times; the median is reported.
BenchmarkReport benchmark(const EnhanceModel& model, int width, int height, int frames, int threads,
                          std::uint64_t seed = 0, int repetitions = 5);

}  // namespace wavelut

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wavelut/fit.hpp"
#include "wavelut/fusion.hpp"
#include "wavelut/image_io.hpp"
#include "wavelut/lattice.hpp"

namespace wavelut {

/// Everything enhance_clip needs, as named in the config file.
struct EnhanceConfig {
    /// A single fitted 4D lattice. When set it is used for every frame and
    /// the bases and predictor are ignored.
    std::optional<std::filesystem::path> lut;
    /// Basis lattices; empty means the built-in set of `basis_count`
    /// lattices of size `n`.
    std::vector<std::filesystem::path> bases;
    int n = 17;
    int basis_count = 3;
    /// Predictor parameter index; without one every basis gets weight 1/K.
    std::optional<std::filesystem::path> predictor;
    MergeMode merge = MergeMode::mean;
    PriorOptions prior;
    /// Worker count; 0 selects WAVELUT_THREADS or the hardware count.
    int threads = 0;
    ImageFormat output_format = ImageFormat::png8;
    double fps = 30.0;

    void validate() const;
};

/// Options of the fit subcommand.
struct FitJobConfig {
    FitConfig fit;
    /// Initial lattice size when no init file is given.
    int n = 17;
    std::optional<std::filesystem::path> init;
    /// Embedding file with "reference" and "enhanced" image vectors and the
    /// "high light image" / "clean image" text vectors; sets varpi.
    std::optional<std::filesystem::path> embeddings;
};

struct AppConfig {
    EnhanceConfig enhance;
    FitJobConfig fit;
};

/// JSON schema (every key optional, unknown keys rejected):
///
///   {
///     "lut": "fitted.wlut4d",
///     "bases": "builtin" | ["a.wlut4d", ...],
///     "n": 17, "basis_count": 3,
///     "predictor": "predictor.json",
///     "merge_mode": "mean" | "sum",
///     "intensity_gamma": 1.0,
///     "fusion": {"mapping": "linear" | "softmax", "temperature": 1.0, "smoothing": 0.0},
///     "threads": 0,
///     "output_format": "png8" | "png16" | "ppm8" | "ppm16",
///     "fps": 30,
///     "fit": {"learning_rate": 4e-4, "steps": 1000, "batch_frames": 8, "crop": 256,
///             "optimizer": "gd" | "momentum" | "adam", "momentum": 0.9,
///             "adam_beta1": 0.9, "adam_beta2": 0.999, "adam_epsilon": 1e-8,
///             "beta_s": 1e-4, "beta_m": 10, "vartheta": 0.1, "epsilon": 1e-6,
///             "varpi": 1.0, "use_ssim": true, "use_fourier": true,
///             "checkpoint_every": 50, "monotone_repair": true, "seed": 0,
///             "n": 17, "init": "init.wlut4d", "embeddings": "embeddings.bin"}
///   }
///
/// Relative paths are resolved against `base_dir`. Throws ConfigError.
AppConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file; paths are relative to its directory.
AppConfig load_config(const std::filesystem::path& path);

}  // namespace wavelut

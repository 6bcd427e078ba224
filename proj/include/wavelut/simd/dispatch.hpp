//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavelut/lattice.hpp"

// ============================================================================
// Platform detection
// ============================================================================

#if defined(__x86_64__) || defined(_M_X64)
#define WAVELUT_X86_64 1
#else
#define WAVELUT_X86_64 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define WAVELUT_ARM64 1
#else
#define WAVELUT_ARM64 0
#endif

namespace wavelut::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view text) noexcept;

/// Per-pixel kernels. Every variant computes the cell index and offsets of a
/// pixel through CoordinateAxis::locate, so variants differ only in how the
/// corner blend is evaluated.
///
/// rgb:   count interleaved RGB triples
/// prior: count scalars (4D only)
/// out:   count interleaved RGB triples
/// Returns the number of input scalars clamped into [0, 1].
using QuadrilinearFn = std::size_t (*)(const Lattice4D& lut, const float* rgb, const float* prior,
                                       float* out, std::size_t count);
using TrilinearFn = std::size_t (*)(const Lattice3D& lut, const float* rgb, float* out,
                                    std::size_t count);

/// dst[i] = round_to_float(sum_k weights[k] * double(sources[k][i])), summed
/// in k order with separate multiply and add, so every variant produces the
/// same bits.
using WeightedSumFn = void (*)(const float* const* sources, const double* weights,
                               std::size_t source_count, float* dst, std::size_t count);

struct KernelTable {
    Isa isa;
    QuadrilinearFn quadrilinear;
    TrilinearFn trilinear;
    WeightedSumFn weighted_sum;
};

/// ISAs compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

/// Best available ISA, unless overridden by set_isa_override() or the
/// WAVELUT_ISA environment variable (scalar | avx2 | neon).
Isa active_isa();

/// Force an ISA for subsequent kernel lookups; nullopt restores detection.
/// Throws InvalidArgument if the ISA is unavailable.
void set_isa_override(std::optional<Isa> isa);

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

/// Short description of the host CPU for benchmark reports.
std::string cpu_description();

}  // namespace wavelut::simd

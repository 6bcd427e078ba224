//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/simd/dispatch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "kernels_internal.hpp"

namespace wavelut::simd {

namespace {

constexpr KernelTable kScalar{Isa::scalar, detail::quadrilinear_scalar, detail::trilinear_scalar,
                              detail::weighted_sum_scalar};
#if WAVELUT_X86_64 && defined(WAVELUT_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, detail::quadrilinear_avx2, detail::trilinear_avx2,
                            detail::weighted_sum_avx2};
#endif
#if WAVELUT_ARM64
constexpr KernelTable kNeon{Isa::neon, detail::quadrilinear_neon, detail::trilinear_neon,
                            detail::weighted_sum_neon};
#endif

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if WAVELUT_X86_64 && defined(WAVELUT_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
            return WAVELUT_ARM64 != 0;
    }
    return false;
}

Isa detect() noexcept {
    if (cpu_supports(Isa::avx2)) {
        return Isa::avx2;
    }
    if (cpu_supports(Isa::neon)) {
        return Isa::neon;
    }
    return Isa::scalar;
}

// -1: no override; otherwise static_cast<int>(Isa).
std::atomic<int> g_override{-1};

Isa from_environment_or_detect() {
    static const Isa chosen = [] {
        if (const char* env = std::getenv("WAVELUT_ISA")) {
            if (auto isa = parse_isa(env); isa && cpu_supports(*isa)) {
                return *isa;
            }
        }
        return detect();
    }();
    return chosen;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::neon:
            return "neon";
    }
    return "unknown";
}

std::optional<Isa> parse_isa(std::string_view text) noexcept {
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (text == to_string(isa)) {
            return isa;
        }
    }
    return std::nullopt;
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (cpu_supports(isa)) {
            out.push_back(isa);
        }
    }
    return out;
}

Isa active_isa() {
    const int forced = g_override.load(std::memory_order_relaxed);
    if (forced >= 0) {
        return static_cast<Isa>(forced);
    }
    return from_environment_or_detect();
}

void set_isa_override(std::optional<Isa> isa) {
    if (isa && !cpu_supports(*isa)) {
        throw InvalidArgument("ISA '" + std::string(to_string(*isa)) + "' is not available");
    }
    g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

const KernelTable& kernels_for(Isa isa) {
    if (!cpu_supports(isa)) {
        throw InvalidArgument("ISA '" + std::string(to_string(isa)) + "' is not available");
    }
    switch (isa) {
#if WAVELUT_X86_64 && defined(WAVELUT_HAVE_AVX2)
        case Isa::avx2:
            return kAvx2;
#endif
#if WAVELUT_ARM64
        case Isa::neon:
            return kNeon;
#endif
        default:
            return kScalar;
    }
}

const KernelTable& kernels() { return kernels_for(active_isa()); }

std::string cpu_description() {
    std::string model = "unknown CPU";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            if (auto colon = line.find(':'); colon != std::string::npos) {
                model = line.substr(colon + 2);
            }
            break;
        }
    }
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    return model + ", " + std::to_string(threads) + " hardware threads, kernels=" +
           std::string(to_string(active_isa()));
}

}  // namespace wavelut::simd

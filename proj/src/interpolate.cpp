//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/interpolate.hpp"

#include <algorithm>
#include <atomic>

#include "wavelut/simd/dispatch.hpp"
#include "wavelut/thread_pool.hpp"

namespace wavelut {

namespace {

void check_quadrilinear_inputs(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior) {
    require_rgb(frame, "quadrilinear_apply");
    if (prior.height() != frame.height() || prior.width() != frame.width()) {
        throw ShapeError("quadrilinear_apply: prior is " + std::to_string(prior.height()) + "x" +
                         std::to_string(prior.width()) + ", frame is " + std::to_string(frame.height()) +
                         "x" + std::to_string(frame.width()));
    }
    if (lut.n() < 2) {
        throw InvalidArgument("quadrilinear_apply: empty lattice");
    }
}

}  // namespace

FrameTensor trilinear_apply(const Lattice3D& lut, const FrameTensor& frame, ClampStats* stats) {
    require_rgb(frame, "trilinear_apply");
    if (lut.n() < 2) {
        throw InvalidArgument("trilinear_apply: empty lattice");
    }
    FrameTensor out(frame.height(), frame.width(), 3);
    const std::size_t clamped =
        simd::kernels().trilinear(lut, frame.values().data(), out.values().data(), frame.pixel_count());
    if (stats != nullptr) {
        *stats += ClampStats{clamped, frame.size()};
    }
    return out;
}

std::size_t quadrilinear_apply_rows(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior,
                                    FrameTensor& out, int row_begin, int row_end) {
    const std::size_t w = static_cast<std::size_t>(frame.width());
    const std::size_t rows = static_cast<std::size_t>(row_end - row_begin);
    return simd::kernels().quadrilinear(lut, frame.row(row_begin), prior.values.row(row_begin),
                                        out.row(row_begin), rows * w);
}

FrameTensor quadrilinear_apply(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior,
                               ClampStats* stats) {
    check_quadrilinear_inputs(lut, frame, prior);
    FrameTensor out(frame.height(), frame.width(), 3);
    const std::size_t clamped = quadrilinear_apply_rows(lut, frame, prior, out, 0, frame.height());
    if (stats != nullptr) {
        *stats += ClampStats{clamped, frame.size() + prior.values.size()};
    }
    return out;
}

FrameTensor quadrilinear_apply(const Lattice4D& lut, const FrameTensor& frame, const PriorMap& prior,
                               ThreadPool& pool, ClampStats* stats) {
    check_quadrilinear_inputs(lut, frame, prior);
    FrameTensor out(frame.height(), frame.width(), 3);
    const std::size_t rows = static_cast<std::size_t>(frame.height());
    const std::size_t grain = std::max<std::size_t>(1, rows / (4 * static_cast<std::size_t>(pool.size())));
    std::atomic<std::size_t> clamped{0};
    pool.parallel_for(rows, grain, [&](std::size_t begin, std::size_t end) {
        clamped += quadrilinear_apply_rows(lut, frame, prior, out, static_cast<int>(begin), static_cast<int>(end));
    });
    if (stats != nullptr) {
        *stats += ClampStats{clamped.load(), frame.size() + prior.values.size()};
    }
    return out;
}

std::array<float, 3> trilinear_sample(const Lattice3D& lut, float r, float g, float b) {
    const float in[3] = {r, g, b};
    std::array<float, 3> out{};
    simd::kernels().trilinear(lut, in, out.data(), 1);
    return out;
}

std::array<float, 3> quadrilinear_sample(const Lattice4D& lut, float r, float g, float b, float e) {
    const float in[3] = {r, g, b};
    std::array<float, 3> out{};
    simd::kernels().quadrilinear(lut, in, &e, out.data(), 1);
    return out;
}

}  // namespace wavelut

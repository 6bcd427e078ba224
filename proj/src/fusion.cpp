//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wavelut/lattice_io.hpp"
#include "wavelut/thread_pool.hpp"

namespace wavelut {

namespace {

void require_same_map_shape(const PriorMap& a, const PriorMap& b, const char* who) {
    if (a.height() != b.height() || a.width() != b.width()) {
        throw ShapeError(std::string(who) + ": prior map shapes differ");
    }
}

bool is_constant(std::span<const float> v) {
    return std::all_of(v.begin(), v.end(), [first = v.front()](float x) { return x == first; });
}

}  // namespace

double similarity(const PriorMap& a, const PriorMap& b) {
    require_same_map_shape(a, b, "similarity");
    const auto va = a.data();
    const auto vb = b.data();
    if (va.empty() || is_constant(va) || is_constant(vb)) {
        return 0.0;
    }
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        ma += va[i];
        mb += vb[i];
    }
    ma /= static_cast<double>(va.size());
    mb /= static_cast<double>(vb.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        const double da = va[i] - ma;
        const double db = vb[i] - mb;
        dot += da * db;
        na += da * da;
        nb += db * db;
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    const double s = dot / std::sqrt(na * nb);
    if (!std::isfinite(s)) {
        throw NumericError("similarity: non-finite result");
    }
    return std::clamp(s, -1.0, 1.0);
}

WeightMapping parse_weight_mapping(const std::string& text) {
    if (text == "linear") {
        return WeightMapping::linear;
    }
    if (text == "softmax") {
        return WeightMapping::softmax;
    }
    throw InvalidArgument("unknown weight mapping '" + text + "' (expected linear or softmax)");
}

std::string to_string(WeightMapping m) { return m == WeightMapping::linear ? "linear" : "softmax"; }

void FusionOptions::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw InvalidArgument("fusion: temperature must be positive");
    }
    if (!(smoothing >= 0.0 && smoothing < 1.0)) {
        throw InvalidArgument("fusion: smoothing must lie in [0, 1)");
    }
}

double similarity_to_weight(double s, const FusionOptions& opt) {
    if (opt.mapping == WeightMapping::softmax) {
        return 1.0 / (1.0 + std::exp(-2.0 * s / opt.temperature));
    }
    return std::clamp((s + 1.0) / 2.0, 0.0, 1.0);
}

FusedPrior blend_priors(const PriorMap& intensity, const PriorMap& lighting, double weight) {
    require_same_map_shape(intensity, lighting, "dynamic_fuse");
    FusedPrior out{PriorMap(intensity.height(), intensity.width(), PriorKind::fused), weight, 0};
    const auto vi = intensity.data();
    const auto vl = lighting.data();
    auto dst = out.fused.data();
    for (std::size_t i = 0; i < vi.size(); ++i) {
        double v = weight * vl[i] + (1.0 - weight) * vi[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            ++out.clamp_count;
            v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        }
        dst[i] = static_cast<float>(v);
    }
    return out;
}

FusedPrior dynamic_fuse(const PriorMap& intensity, const PriorMap& lighting, const FusionOptions& opt) {
    opt.validate();
    return blend_priors(intensity, lighting, similarity_to_weight(similarity(intensity, lighting), opt));
}

std::string FusionReport::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "frame_index,weight,clamp_count\n";
    for (std::size_t i = 0; i < per_frame_weight.size(); ++i) {
        out << i << ',' << per_frame_weight[i] << ',' << (i < per_frame_clamp.size() ? per_frame_clamp[i] : 0)
            << '\n';
    }
    return out.str();
}

void FusionReport::save_csv(const std::filesystem::path& path) const {
    const std::string text = to_csv();
    write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

FusedSequence fuse_sequence(const std::vector<PriorMap>& intensities, const std::vector<PriorMap>& lightings,
                            const FusionOptions& opt, ThreadPool* pool) {
    if (intensities.size() != lightings.size()) {
        throw InvalidArgument("fuse_sequence: intensity and lighting lists differ in length");
    }
    opt.validate();
    const std::size_t count = intensities.size();
    FusedSequence out;
    out.fused.resize(count);
    out.report.per_frame_weight.resize(count);
    out.report.per_frame_clamp.resize(count);

    auto run = [&](std::size_t begin, std::size_t end, auto&& fn) {
        if (pool) {
            pool->parallel_for(end - begin, 1, [&](std::size_t b, std::size_t e) {
                for (std::size_t i = b; i < e; ++i) {
                    fn(begin + i);
                }
            });
        } else {
            for (std::size_t i = begin; i < end; ++i) {
                fn(i);
            }
        }
    };

    std::vector<double> weights(count);
    run(0, count, [&](std::size_t i) {
        weights[i] = similarity_to_weight(similarity(intensities[i], lightings[i]), opt);
    });
    if (opt.smoothing > 0.0) {
        for (std::size_t i = 1; i < count; ++i) {
            weights[i] = opt.smoothing * weights[i - 1] + (1.0 - opt.smoothing) * weights[i];
        }
    }
    run(0, count, [&](std::size_t i) {
        auto r = blend_priors(intensities[i], lightings[i], weights[i]);
        out.fused[i] = std::move(r.fused);
        out.report.per_frame_weight[i] = r.weight;
        out.report.per_frame_clamp[i] = r.clamp_count;
    });
    for (std::size_t c : out.report.per_frame_clamp) {
        out.report.clamp_count += c;
    }
    return out;
}

FramePrior frame_prior(const FrameTensor& frame, const PriorOptions& opt) {
    require_rgb(frame, "frame_prior");
    FramePrior p;
    p.ll = dwt2(frame).ll;
    p.lighting = lighting_prior(p.ll, frame.height(), frame.width());
    p.intensity = intensity_map(frame, opt.intensity_gamma);
    p.fused = dynamic_fuse(p.intensity, p.lighting, opt.fusion);
    return p;
}

}  // namespace wavelut

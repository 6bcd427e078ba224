//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <exception>
#include <random>
#include <sstream>

#include "wavelut/error.hpp"
#include "wavelut/lattice_io.hpp"
#include "wavelut/simd/dispatch.hpp"
#include "wavelut/thread_pool.hpp"
#include "wavelut/wavelet.hpp"

namespace wavelut {

void EnhanceModel::validate() const {
    if (bases.empty()) {
        throw ConfigError("model: no lattices");
    }
    for (std::size_t k = 1; k < bases.size(); ++k) {
        if (bases[k].n() != bases[0].n() || bases[k].axes() != bases[0].axes()) {
            throw ConfigError("model: basis " + std::to_string(k) + " differs in size or axes from basis 0");
        }
    }
    if (predictor) {
        try {
            predictor->validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
        if (predictor->outputs() != static_cast<int>(bases.size())) {
            throw ConfigError("model: predictor has " + std::to_string(predictor->outputs()) +
                              " outputs for " + std::to_string(bases.size()) + " bases");
        }
    }
}

EnhanceModel EnhanceModel::builtin(int n, int basis_count) {
    EnhanceModel m;
    m.bases = make_default_bases(n, basis_count);
    return m;
}

EnhanceModel EnhanceModel::single(Lattice4D lut) {
    EnhanceModel m;
    m.bases.push_back(std::move(lut));
    return m;
}

EnhanceModel load_model(const EnhanceConfig& cfg) {
    cfg.validate();
    EnhanceModel m;
    if (cfg.lut) {
        m.bases.push_back(load_wlut4d(*cfg.lut));
    } else {
        if (cfg.bases.empty()) {
            m.bases = make_default_bases(cfg.n, cfg.basis_count);
        } else {
            for (const auto& p : cfg.bases) {
                m.bases.push_back(load_wlut4d(p));
            }
        }
        if (cfg.predictor) {
            m.predictor = load_predictor(*cfg.predictor);
        }
        m.merge = cfg.merge;
    }
    m.prior = cfg.prior;
    m.validate();
    return m;
}

namespace {

template <typename Fn>
auto run_stage(const char* stage, std::size_t frame, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        std::throw_with_nested(StageError(stage, "frame " + std::to_string(frame) + ": " + e.what()));
    }
}

void for_frames(ThreadPool* pool, std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (pool && pool->size() > 1 && count > 1) {
        pool->parallel_for(count, 1, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                fn(i);
            }
        });
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
    }
}

}  // namespace

EnhanceResult enhance_clip(const ClipSequence& clip, const EnhanceModel& model, ThreadPool* pool,
                           const DenoiseHook& denoise) {
    if (clip.empty()) {
        throw EmptySequenceError("enhance_clip: empty clip");
    }
    clip.validate();
    model.validate();
    const std::size_t count = clip.size();

    std::vector<FrameTensor> lls(count);
    std::vector<PriorMap> intensities(count);
    std::vector<PriorMap> lightings(count);
    for_frames(pool, count, [&](std::size_t i) {
        const FrameTensor& frame = clip.frames[i];
        lls[i] = run_stage("wavelet", i, [&] { return dwt2(frame).ll; });
        lightings[i] = run_stage("lighting", i, [&] { return lighting_prior(lls[i], frame.height(), frame.width()); });
        intensities[i] = run_stage("intensity", i, [&] { return intensity_map(frame, model.prior.intensity_gamma); });
    });

    FusedSequence fused = run_stage("fusion", 0, [&] {
        return fuse_sequence(intensities, lightings, model.prior.fusion, pool);
    });

    EnhanceResult out;
    out.clip.fps = clip.fps;
    out.clip.source = clip.source;
    out.clip.frames.resize(count);
    out.weights.resize(count);
    std::vector<ClampStats> stats(count);
    const bool single = model.bases.size() == 1 && !model.predictor;
    const std::vector<double> uniform(model.bases.size(), 1.0 / static_cast<double>(model.bases.size()));
    for_frames(pool, count, [&](std::size_t i) {
        const FrameTensor& frame = clip.frames[i];
        Lattice4D fused_lut;
        const Lattice4D* lut = &model.bases[0];
        if (single) {
            out.weights[i] = {1.0};
        } else {
            const FusionWeights w = run_stage("predictor", i, [&] {
                return model.predictor ? predict_fusion_weights(frame, lls[i], *model.predictor, model.merge)
                                       : merged_only(uniform);
            });
            out.weights[i] = w.merged;
            fused_lut = run_stage("basis fusion", i, [&] { return fuse_basis_luts(model.bases, w); });
            lut = &fused_lut;
        }
        out.clip.frames[i] = run_stage("lookup", i, [&] {
            FrameTensor mapped = quadrilinear_apply(*lut, frame, fused.fused[i], &stats[i]);
            for (float& v : mapped.values()) {
                clamp_unit(v);
            }
            return mapped;
        });
        if (denoise) {
            run_stage("denoise", i, [&] { denoise(out.clip.frames[i]); });
        }
    });
    for (const auto& s : stats) {
        out.clamps += s;
    }
    out.report = std::move(fused.report);
    return out;
}

std::string BenchmarkReport::to_text() const {
    std::ostringstream os;
    os << "frames " << frames << " at " << width << "x" << height << ", threads " << threads << ", isa " << isa
       << ", median of " << repetitions << "\n";
    os << "pipeline: " << pipeline_ms_per_frame << " ms/frame, " << pipeline_fps << " fps\n";
    os << "lookup:   " << apply_ms_per_frame << " ms/frame, " << apply_fps << " fps\n";
    return os.str();
}

std::string BenchmarkReport::to_json() const {
    nlohmann::json j = {{"width", width},
                        {"height", height},
                        {"frames", frames},
                        {"threads", threads},
                        {"repetitions", repetitions},
                        {"isa", isa},
                        {"pipeline_ms_per_frame", pipeline_ms_per_frame},
                        {"pipeline_fps", pipeline_fps},
                        {"apply_ms_per_frame", apply_ms_per_frame},
                        {"apply_fps", apply_fps}};
    return j.dump(2);
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BenchmarkReport benchmark(const EnhanceModel& model, int width, int height, int frames, int threads,
                          std::uint64_t seed, int repetitions) {
    if (width < 2 || height < 2 || frames < 1 || threads < 1 || repetitions < 1) {
        throw InvalidArgument("benchmark: sizes, frames, threads and repetitions must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    ClipSequence clip;
    for (int f = 0; f < frames; ++f) {
        FrameTensor frame(height, width, 3);
        for (float& v : frame.values()) {
            v = dist(rng);
        }
        clip.frames.push_back(std::move(frame));
    }
    ThreadPool pool(threads);
    using clock = std::chrono::steady_clock;

    enhance_clip(clip, model, &pool);
    std::vector<double> pipeline_ms;
    for (int r = 0; r < repetitions; ++r) {
        const auto t0 = clock::now();
        enhance_clip(clip, model, &pool);
        pipeline_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count() / frames);
    }

    std::vector<PriorMap> priors;
    for (const auto& frame : clip.frames) {
        priors.push_back(frame_prior(frame, model.prior).fused.fused);
    }
    const Lattice4D& lut = model.bases[0];
    std::vector<double> apply_ms;
    for (int r = 0; r < repetitions + 1; ++r) {
        const auto t0 = clock::now();
        for (std::size_t i = 0; i < clip.size(); ++i) {
            if (threads > 1) {
                quadrilinear_apply(lut, clip.frames[i], priors[i], pool);
            } else {
                quadrilinear_apply(lut, clip.frames[i], priors[i]);
            }
        }
        if (r > 0) {
            apply_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count() / frames);
        }
    }

    BenchmarkReport rep;
    rep.width = width;
    rep.height = height;
    rep.frames = frames;
    rep.threads = threads;
    rep.repetitions = repetitions;
    rep.isa = std::string(simd::to_string(simd::active_isa()));
    rep.pipeline_ms_per_frame = median(pipeline_ms);
    rep.pipeline_fps = 1000.0 / rep.pipeline_ms_per_frame;
    rep.apply_ms_per_frame = median(apply_ms);
    rep.apply_fps = 1000.0 / rep.apply_ms_per_frame;
    return rep;
}

}  // namespace wavelut

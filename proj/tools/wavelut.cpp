//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

// wavelut: enhance frame sequences with 4D lattices, fit lattices, and
// inspect the pieces.
//
// Exit codes: 0 success, 1 other failure, 2 configuration or usage error,
// 3 I/O or file format error, 4 numeric error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "wavelut/config.hpp"
#include "wavelut/error.hpp"
#include "wavelut/fit.hpp"
#include "wavelut/image_io.hpp"
#include "wavelut/lattice_io.hpp"
#include "wavelut/losses.hpp"
#include "wavelut/metrics.hpp"
#include "wavelut/pipeline.hpp"
#include "wavelut/simd/dispatch.hpp"
#include "wavelut/thread_pool.hpp"
#include "wavelut/wavelet.hpp"

namespace fs = std::filesystem;
using namespace wavelut;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kIo = 3, kNumeric = 4 };

int classify(const std::exception& e) {
    if (dynamic_cast<const StageError*>(&e)) {
        try {
            std::rethrow_if_nested(e);
        } catch (const std::exception& inner) {
            return classify(inner);
        }
        return kOther;
    }
    if (dynamic_cast<const ConfigError*>(&e)) {
        return kConfig;
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
        dynamic_cast<const EmptySequenceError*>(&e)) {
        return kIo;
    }
    if (dynamic_cast<const NumericError*>(&e)) {
        return kNumeric;
    }
    return kOther;
}

AppConfig read_config(const std::string& path) {
    return path.empty() ? AppConfig{} : load_config(path);
}

int resolve_threads(int cli, int cfg) {
    if (cli > 0) {
        return cli;
    }
    if (cfg > 0) {
        return cfg;
    }
    return default_thread_count();
}

bool has_ext(const fs::path& p, const char* ext) {
    std::string e = p.extension().string();
    for (char& c : e) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return e == ext;
}

template <typename Fn>
auto as_config(Fn&& fn) {
    try {
        return fn();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

// ----------------------------------------------------------------------------
// enhance

struct EnhanceArgs {
    std::string input, output, config, lut, predictor, merge, format, report, mapping;
    std::vector<std::string> bases;
    int threads = 0, n = 0, basis_count = 0;
    double fps = 0.0, gamma = 0.0, temperature = 0.0, smoothing = -1.0;
    bool quiet = false;
};

int run_enhance(const EnhanceArgs& a) {
    AppConfig cfg = read_config(a.config);
    EnhanceConfig& e = cfg.enhance;
    if (!a.lut.empty()) {
        e.lut = a.lut;
    }
    if (!a.bases.empty()) {
        e.bases.assign(a.bases.begin(), a.bases.end());
    }
    if (!a.predictor.empty()) {
        e.predictor = a.predictor;
    }
    if (!a.merge.empty()) {
        e.merge = as_config([&] { return parse_merge_mode(a.merge); });
    }
    if (!a.format.empty()) {
        e.output_format = as_config([&] { return parse_image_format(a.format); });
    }
    if (!a.mapping.empty()) {
        e.prior.fusion.mapping = as_config([&] { return parse_weight_mapping(a.mapping); });
    }
    if (a.n > 0) {
        e.n = a.n;
    }
    if (a.basis_count > 0) {
        e.basis_count = a.basis_count;
    }
    if (a.fps > 0.0) {
        e.fps = a.fps;
    }
    if (a.gamma > 0.0) {
        e.prior.intensity_gamma = a.gamma;
    }
    if (a.temperature > 0.0) {
        e.prior.fusion.temperature = a.temperature;
    }
    if (a.smoothing >= 0.0) {
        e.prior.fusion.smoothing = a.smoothing;
    }
    e.validate();

    const EnhanceModel model = load_model(e);
    const ClipSequence clip = load_frames(a.input, e.fps);
    const int threads = resolve_threads(a.threads, e.threads);
    ThreadPool pool(threads);
    const EnhanceResult r = enhance_clip(clip, model, &pool);
    save_frames(r.clip, a.output, e.output_format);
    if (!a.report.empty()) {
        r.report.save_csv(a.report);
    }
    if (!a.quiet) {
        std::printf("enhanced %zu frames (%dx%d) with %d thread(s); %zu prior values clamped\n", r.clip.size(),
                    r.clip.frames[0].width(), r.clip.frames[0].height(), threads, r.report.clamp_count);
    }
    return kOk;
}

// ----------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string input, reference, output, config, init, embeddings, history, optimizer;
    int steps = 0, batch = 0, crop = 0, n = 0, threads = 0, checkpoint = 0;
    double lr = 0.0, varpi = -1.0;
    long long seed = -1;
    bool no_ssim = false, no_fourier = false, no_repair = false, quiet = false;
};

std::vector<FitSample> paired_samples(const ClipSequence& in, const ClipSequence& ref, const PriorOptions& prior) {
    if (in.size() != ref.size()) {
        throw FormatError("input has " + std::to_string(in.size()) + " frames, reference has " +
                          std::to_string(ref.size()));
    }
    std::vector<FitSample> data;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (!in.frames[i].same_shape(ref.frames[i])) {
            throw FormatError("frame " + std::to_string(i) + ": input and reference sizes differ");
        }
        data.push_back({in.frames[i], frame_prior(in.frames[i], prior).fused.fused, ref.frames[i]});
    }
    return data;
}

int run_fit(const FitArgs& a) {
    AppConfig cfg = read_config(a.config);
    FitJobConfig& job = cfg.fit;
    FitConfig& f = job.fit;
    if (a.steps > 0) {
        f.steps = a.steps;
    }
    if (a.batch > 0) {
        f.batch_frames = a.batch;
    }
    if (a.crop > 0) {
        f.crop = a.crop;
    }
    if (a.lr > 0.0) {
        f.learning_rate = a.lr;
    }
    if (a.checkpoint > 0) {
        f.checkpoint_every = a.checkpoint;
    }
    if (!a.optimizer.empty()) {
        f.optimizer = as_config([&] { return parse_optimizer(a.optimizer); });
    }
    if (a.seed >= 0) {
        f.seed = static_cast<std::uint64_t>(a.seed);
    }
    if (a.no_ssim) {
        f.use_ssim = false;
    }
    if (a.no_fourier) {
        f.use_fourier = false;
    }
    if (a.no_repair) {
        f.monotone_repair = false;
    }
    if (a.n > 0) {
        job.n = a.n;
    }
    if (!a.init.empty()) {
        job.init = a.init;
    }
    if (!a.embeddings.empty()) {
        job.embeddings = a.embeddings;
    }
    if (job.embeddings) {
        const auto vecs = load_embeddings(*job.embeddings);
        f.varpi = varpi_from_embeddings(find_embedding(vecs, "reference"), find_embedding(vecs, "enhanced"),
                                        find_embedding(vecs, "high light image"), find_embedding(vecs, "clean image"));
    }
    if (a.varpi >= 0.0) {
        f.varpi = a.varpi;
    }
    as_config([&] {
        f.validate();
        return 0;
    });

    const ClipSequence in = load_frames(a.input);
    const ClipSequence ref = load_frames(a.reference);
    const auto data = paired_samples(in, ref, cfg.enhance.prior);
    const Lattice4D init = job.init ? load_wlut4d(*job.init) : make_identity_lattice4d(job.n);
    ThreadPool pool(resolve_threads(a.threads, cfg.enhance.threads));
    if (!a.quiet) {
        std::printf("fitting n=%d on %zu pairs: %s, lr %g, %d steps, varpi %.4f\n", init.n(), data.size(),
                    to_string(f.optimizer).c_str(), f.learning_rate, f.steps, f.varpi);
    }
    try {
        const FitResult r = fit_lattice(init, data, f, &pool);
        save_wlut4d(r.lattice, a.output);
        if (!a.history.empty()) {
            const std::string csv = history_csv(r.history);
            write_file_bytes(a.history, std::vector<std::uint8_t>(csv.begin(), csv.end()));
        }
        if (!a.quiet) {
            std::printf("loss %.6g -> %.6g (best at step %d); wrote %s\n", r.initial_loss, r.best_loss, r.best_step,
                        a.output.c_str());
        }
    } catch (const FitDivergence& e) {
        const fs::path rescue = fs::path(a.output).concat(".last_finite");
        save_wlut4d(e.last_finite_lattice(), rescue);
        std::fprintf(stderr, "wavelut: %s; last finite checkpoint (step %d) saved to %s\n", e.what(),
                     e.last_finite_step(), rescue.c_str());
        return kNumeric;
    }
    return kOk;
}

// ----------------------------------------------------------------------------
// predictor

struct PredictorArgs {
    std::string input, reference, output, merge = "mean";
    int n = 17, count = 3;
    double ridge = 1e-2;
};

int run_predictor(const PredictorArgs& a) {
    const ClipSequence in = load_frames(a.input);
    const ClipSequence ref = load_frames(a.reference);
    if (in.size() != ref.size()) {
        throw FormatError("input and reference frame counts differ");
    }
    std::vector<PredictorFitPair> pairs;
    for (std::size_t i = 0; i < in.size(); ++i) {
        pairs.push_back({in.frames[i], ref.frames[i]});
    }
    const MergeMode mode = as_config([&] { return parse_merge_mode(a.merge); });
    const PredictorParams p = fit_predictor(make_default_bases(a.n, a.count), pairs, mode, a.ridge);
    save_predictor(p, a.output);
    std::printf("predictor with %d outputs fitted on %zu pairs; wrote %s\n", p.outputs(), pairs.size(),
                a.output.c_str());
    return kOk;
}

// ----------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string config;
    int width = 1920, height = 1080, frames = 8, threads = 0, reps = 5, n = 0;
    long long seed = 0;
    bool json = false;
};

int run_bench(const BenchArgs& a) {
    AppConfig cfg = read_config(a.config);
    if (a.n > 0) {
        cfg.enhance.n = a.n;
    }
    cfg.enhance.validate();
    const EnhanceModel model = load_model(cfg.enhance);
    const int threads = resolve_threads(a.threads, cfg.enhance.threads);
    const BenchmarkReport r =
        benchmark(model, a.width, a.height, a.frames, threads, static_cast<std::uint64_t>(a.seed), a.reps);
    if (a.json) {
        std::printf("%s\n", r.to_json().c_str());
    } else {
        std::printf("%s", r.to_text().c_str());
        std::printf("cpu: %s\n", simd::cpu_description().c_str());
    }
    return kOk;
}

// ----------------------------------------------------------------------------
// metrics

struct MetricsArgs {
    std::string a, b, csv;
    bool json = false;
};

int run_metrics(const MetricsArgs& m) {
    const ClipSequence a = load_frames(m.a);
    const ClipSequence b = load_frames(m.b);
    if (a.size() != b.size()) {
        throw FormatError("sequences have " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                          " frames");
    }
    const MetricReport r = evaluate(a.frames, b.frames);
    if (!m.csv.empty()) {
        const std::string csv = r.to_csv();
        write_file_bytes(m.csv, std::vector<std::uint8_t>(csv.begin(), csv.end()));
    }
    if (m.json) {
        std::printf("%s\n", r.to_json().c_str());
    } else {
        std::printf("frames %zu  psnr %.4f dB  ssim %.6f\n", a.size(), r.psnr_db, r.ssim);
    }
    return kOk;
}

// ----------------------------------------------------------------------------
// lut

struct LutArgs {
    std::string file, out, out_dir, title;
    int n = 17, count = 3;
    double prior = 0.5;
};

int run_lut_inspect(const LutArgs& a) {
    if (has_ext(a.file, ".cube")) {
        const Lattice3D lut = load_cube(a.file);
        const auto [lo, hi] = std::minmax_element(lut.values().begin(), lut.values().end());
        std::printf("format  cube\nn       %d\nentries %zu\nrange   [%g, %g]\n", lut.n(), lut.entry_count(), *lo,
                    *hi);
        return kOk;
    }
    const Lattice4D lut = load_wlut4d(a.file);
    const auto [lo, hi] = std::minmax_element(lut.values().begin(), lut.values().end());
    const Lattice4D ident = make_identity_lattice4d(lut.axes());
    double dev = 0.0;
    for (std::size_t i = 0; i < lut.value_count(); ++i) {
        dev = std::max(dev, std::abs(static_cast<double>(lut.values()[i]) - ident.values()[i]));
    }
    std::printf("format    wlut4d\nn         %d\naxes      %s\nentries   %zu\nrange     [%g, %g]\n", lut.n(),
                lut.uniform_axes() ? "uniform" : "explicit", lut.entry_count(), *lo, *hi);
    std::printf("monotone  %.6g\nidentity  max deviation %.6g\n", monotone_loss(lut), dev);
    return kOk;
}

int run_lut_convert(const LutArgs& a) {
    const bool in_cube = has_ext(a.file, ".cube");
    const bool out_cube = has_ext(a.out, ".cube");
    if (in_cube && out_cube) {
        save_cube(load_cube(a.file), a.out, a.title);
    } else if (in_cube) {
        const Lattice3D cube = load_cube(a.file);
        save_wlut4d(extend_to_4d(cube, cube.n()), a.out);
    } else if (out_cube) {
        save_cube(slice_at_prior(load_wlut4d(a.file), static_cast<float>(a.prior)), a.out, a.title);
    } else {
        save_wlut4d(load_wlut4d(a.file), a.out);
    }
    std::printf("wrote %s\n", a.out.c_str());
    return kOk;
}

int run_lut_identity(const LutArgs& a) {
    if (has_ext(a.out, ".cube")) {
        save_cube(make_identity_lattice3d(a.n), a.out, a.title);
    } else {
        save_wlut4d(make_identity_lattice4d(a.n), a.out);
    }
    std::printf("wrote %s\n", a.out.c_str());
    return kOk;
}

int run_lut_basis(const LutArgs& a) {
    const auto bases = make_default_bases(a.n, a.count);
    fs::create_directories(a.out_dir);
    for (std::size_t k = 0; k < bases.size(); ++k) {
        const fs::path p = fs::path(a.out_dir) / ("basis_" + std::to_string(k) + ".wlut4d");
        save_wlut4d(bases[k], p);
        std::printf("wrote %s\n", p.c_str());
    }
    return kOk;
}

// ----------------------------------------------------------------------------
// dwt

struct DwtArgs {
    std::string input, output, band = "ll", format;
};

int run_dwt(const DwtArgs& a) {
    const FrameTensor frame = load_image(a.input);
    const WaveletBands bands = dwt2(frame);
    FrameTensor out;
    float offset = 0.5f;
    if (a.band == "ll") {
        out = bands.ll;
        offset = 0.0f;
    } else if (a.band == "lh") {
        out = bands.lh;
    } else if (a.band == "hl") {
        out = bands.hl;
    } else if (a.band == "hh") {
        out = bands.hh;
    } else {
        throw ConfigError("dwt: band must be ll, lh, hl or hh");
    }
    for (float& v : out.values()) {
        v += offset;
    }
    ImageFormat fmt = has_ext(a.output, ".ppm") ? ImageFormat::ppm16 : ImageFormat::png16;
    if (!a.format.empty()) {
        fmt = as_config([&] { return parse_image_format(a.format); });
    }
    save_image(out, a.output, fmt);
    std::printf("%s band %dx%d written to %s\n", a.band.c_str(), out.width(), out.height(), a.output.c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelut: prior-guided 4D lattice enhancement for low-light frame sequences"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "wavelut 0.3.0");
    std::string isa;
    app.add_option("--isa", isa, "Force a kernel set (scalar, avx2, neon)");

    EnhanceArgs ea;
    auto* enhance = app.add_subcommand("enhance", "Enhance a frame sequence");
    enhance->add_option("-i,--input", ea.input, "Input directory or glob")->required();
    enhance->add_option("-o,--output", ea.output, "Output directory")->required();
    enhance->add_option("-c,--config", ea.config, "JSON config file");
    enhance->add_option("-t,--threads", ea.threads, "Worker threads (default: WAVELUT_THREADS or all cores)");
    enhance->add_option("--lut", ea.lut, "Single fitted WLUT4D lattice");
    enhance->add_option("--bases", ea.bases, "Basis WLUT4D lattices");
    enhance->add_option("--predictor", ea.predictor, "Predictor parameter index (JSON)");
    enhance->add_option("--merge-mode", ea.merge, "mean or sum");
    enhance->add_option("--n", ea.n, "Built-in basis size");
    enhance->add_option("--basis-count", ea.basis_count, "Built-in basis count");
    enhance->add_option("--format", ea.format, "png8, png16, ppm8 or ppm16");
    enhance->add_option("--fps", ea.fps, "Frame rate recorded with the clip");
    enhance->add_option("--gamma", ea.gamma, "Intensity map gamma");
    enhance->add_option("--mapping", ea.mapping, "Fusion weight mapping: linear or softmax");
    enhance->add_option("--temperature", ea.temperature, "Softmax temperature");
    enhance->add_option("--smoothing", ea.smoothing, "Temporal smoothing of fusion weights in [0, 1)");
    enhance->add_option("--report", ea.report, "Write the per-frame fusion report as CSV");
    enhance->add_flag("-q,--quiet", ea.quiet);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Fit a 4D lattice to paired frames");
    fit->add_option("-i,--input", fa.input, "Low-light frames")->required();
    fit->add_option("-r,--reference", fa.reference, "Reference frames, same order")->required();
    fit->add_option("-o,--output", fa.output, "Fitted WLUT4D file")->required();
    fit->add_option("-c,--config", fa.config, "JSON config file (the \"fit\" section)");
    fit->add_option("--init", fa.init, "Initial lattice (default identity)");
    fit->add_option("--n", fa.n, "Identity init size");
    fit->add_option("--steps", fa.steps);
    fit->add_option("--lr", fa.lr, "Learning rate");
    fit->add_option("--batch", fa.batch, "Frames per step");
    fit->add_option("--crop", fa.crop, "Square crop size per frame");
    fit->add_option("--optimizer", fa.optimizer, "gd, momentum or adam");
    fit->add_option("--checkpoint-every", fa.checkpoint);
    fit->add_option("--seed", fa.seed);
    fit->add_option("--varpi", fa.varpi, "Amplitude/phase balance of the Fourier term");
    fit->add_option("--embeddings", fa.embeddings, "Embedding file that sets varpi");
    fit->add_option("--history", fa.history, "Write the loss history as CSV");
    fit->add_option("-t,--threads", fa.threads);
    fit->add_flag("--no-ssim", fa.no_ssim);
    fit->add_flag("--no-fourier", fa.no_fourier);
    fit->add_flag("--no-repair", fa.no_repair, "Disable the monotone projection after each step");
    fit->add_flag("-q,--quiet", fa.quiet);

    PredictorArgs pa;
    auto* pred = app.add_subcommand("predictor", "Fit predictor heads for the built-in bases");
    pred->add_option("-i,--input", pa.input)->required();
    pred->add_option("-r,--reference", pa.reference)->required();
    pred->add_option("-o,--output", pa.output, "Parameter index (JSON)")->required();
    pred->add_option("--n", pa.n);
    pred->add_option("--count", pa.count);
    pred->add_option("--merge-mode", pa.merge);
    pred->add_option("--ridge", pa.ridge);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Measure throughput on a random clip");
    bench->add_option("--width", ba.width);
    bench->add_option("--height", ba.height);
    bench->add_option("--frames", ba.frames);
    bench->add_option("-t,--threads", ba.threads);
    bench->add_option("--reps", ba.reps);
    bench->add_option("--seed", ba.seed);
    bench->add_option("--n", ba.n, "Built-in basis size");
    bench->add_option("-c,--config", ba.config);
    bench->add_flag("--json", ba.json);

    MetricsArgs ma;
    auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM between two sequences");
    metrics->add_option("--a", ma.a)->required();
    metrics->add_option("--b", ma.b)->required();
    metrics->add_option("--csv", ma.csv, "Write per-frame values");
    metrics->add_flag("--json", ma.json);

    LutArgs la;
    auto* lut = app.add_subcommand("lut", "Lattice utilities");
    lut->require_subcommand(1);
    auto* inspect = lut->add_subcommand("inspect", "Summarise a .wlut4d or .cube file");
    inspect->add_option("file", la.file)->required();
    auto* convert = lut->add_subcommand("convert", "Convert between .wlut4d and .cube");
    convert->add_option("input", la.file)->required();
    convert->add_option("output", la.out)->required();
    convert->add_option("--prior", la.prior, "Prior value of the 3D slice");
    convert->add_option("--title", la.title);
    auto* identity = lut->add_subcommand("identity", "Write an identity lattice");
    identity->add_option("output", la.out)->required();
    identity->add_option("--n", la.n);
    identity->add_option("--title", la.title);
    auto* basis = lut->add_subcommand("basis", "Write the built-in basis lattices");
    basis->add_option("output_dir", la.out_dir)->required();
    basis->add_option("--n", la.n);
    basis->add_option("--count", la.count);

    DwtArgs da;
    auto* dwt = app.add_subcommand("dwt", "Dump one Haar band of an image");
    dwt->add_option("-i,--input", da.input)->required();
    dwt->add_option("-o,--output", da.output)->required();
    dwt->add_option("--band", da.band, "ll, lh, hl or hh (details are offset by 0.5)");
    dwt->add_option("--format", da.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (!isa.empty()) {
            const auto parsed = simd::parse_isa(isa);
            if (!parsed) {
                throw ConfigError("unknown --isa '" + isa + "'");
            }
            simd::set_isa_override(*parsed);
        }
        if (*enhance) {
            return run_enhance(ea);
        }
        if (*fit) {
            return run_fit(fa);
        }
        if (*pred) {
            return run_predictor(pa);
        }
        if (*bench) {
            return run_bench(ba);
        }
        if (*metrics) {
            return run_metrics(ma);
        }
        if (*inspect) {
            return run_lut_inspect(la);
        }
        if (*convert) {
            return run_lut_convert(la);
        }
        if (*identity) {
            return run_lut_identity(la);
        }
        if (*basis) {
            return run_lut_basis(la);
        }
        if (*dwt) {
            return run_dwt(da);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "wavelut: %s\n", e.what());
        return classify(e);
    }
    return kOther;
}

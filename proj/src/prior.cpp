//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/prior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "wavelut/lattice_io.hpp"

namespace wavelut {

namespace {

double luma(double r, double g, double b) { return kLumaR * r + kLumaG * g + kLumaB * b; }

float unit(double v) { return static_cast<float>(std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0)); }

struct Span1d {
    int begin;
    int end;
};

// Cell i of `cells` equal slices of [0, len); never empty.
Span1d cell_range(int i, int cells, int len) {
    const int begin = std::min(static_cast<int>(static_cast<long long>(i) * len / cells), len - 1);
    const int end = std::max(static_cast<int>(static_cast<long long>(i + 1) * len / cells), begin + 1);
    return {begin, end};
}

}  // namespace

PriorMap intensity_map(const FrameTensor& frame, double gamma) {
    require_rgb(frame, "intensity_map");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidArgument("intensity_map: gamma must be positive");
    }
    PriorMap out(frame.height(), frame.width(), PriorKind::intensity);
    const float* src = frame.values().data();
    float* dst = out.data().data();
    const std::size_t count = frame.pixel_count();
    for (std::size_t i = 0; i < count; ++i) {
        double y = std::clamp(luma(src[3 * i], src[3 * i + 1], src[3 * i + 2]), 0.0, 1.0);
        if (gamma != 1.0) {
            y = std::pow(y, gamma);
        }
        dst[i] = unit(y);
    }
    return out;
}

PriorMap lighting_prior(const FrameTensor& ll, int target_h, int target_w) {
    require_rgb(ll, "lighting_prior");
    const int sh = ll.height();
    const int sw = ll.width();
    if (target_h < sh || target_w < sw) {
        throw InvalidArgument("lighting_prior: target is smaller than the LL band");
    }
    std::vector<double> y(static_cast<std::size_t>(sh) * sw);
    for (int r = 0; r < sh; ++r) {
        for (int c = 0; c < sw; ++c) {
            y[static_cast<std::size_t>(r) * sw + c] = luma(ll.at(r, c, 0), ll.at(r, c, 1), ll.at(r, c, 2));
        }
    }

    struct Tap {
        int i0, i1;
        double t;
    };
    auto taps = [](int dst, int src) {
        std::vector<Tap> out(static_cast<std::size_t>(dst));
        const double scale = static_cast<double>(src) / dst;
        for (int d = 0; d < dst; ++d) {
            const double p = std::clamp((d + 0.5) * scale - 0.5, 0.0, static_cast<double>(src - 1));
            const int i0 = static_cast<int>(std::floor(p));
            const int i1 = std::min(i0 + 1, src - 1);
            out[static_cast<std::size_t>(d)] = {i0, i1, p - i0};
        }
        return out;
    };
    const auto ty = taps(target_h, sh);
    const auto tx = taps(target_w, sw);

    PriorMap out(target_h, target_w, PriorKind::lighting);
    for (int r = 0; r < target_h; ++r) {
        const Tap& a = ty[static_cast<std::size_t>(r)];
        const double* y0 = y.data() + static_cast<std::size_t>(a.i0) * sw;
        const double* y1 = y.data() + static_cast<std::size_t>(a.i1) * sw;
        for (int c = 0; c < target_w; ++c) {
            const Tap& b = tx[static_cast<std::size_t>(c)];
            const double top = (1.0 - b.t) * y0[b.i0] + b.t * y0[b.i1];
            const double bottom = (1.0 - b.t) * y1[b.i0] + b.t * y1[b.i1];
            out.at(r, c) = unit((1.0 - a.t) * top + a.t * bottom);
        }
    }
    return out;
}

std::vector<double> pooled_features(const FrameTensor& tensor) {
    require_rgb(tensor, "pooled_features");
    std::vector<double> f(kFeatureLength);
    for (int gy = 0; gy < kPoolRows; ++gy) {
        const Span1d rows = cell_range(gy, kPoolRows, tensor.height());
        for (int gx = 0; gx < kPoolCols; ++gx) {
            const Span1d cols = cell_range(gx, kPoolCols, tensor.width());
            double sum[kPoolSignals] = {};
            double sq[kPoolSignals] = {};
            double lo[kPoolSignals];
            double hi[kPoolSignals];
            std::fill(lo, lo + kPoolSignals, std::numeric_limits<double>::infinity());
            std::fill(hi, hi + kPoolSignals, -std::numeric_limits<double>::infinity());
            for (int y = rows.begin; y < rows.end; ++y) {
                for (int x = cols.begin; x < cols.end; ++x) {
                    const double s[kPoolSignals] = {tensor.at(y, x, 0), tensor.at(y, x, 1), tensor.at(y, x, 2),
                                                    luma(tensor.at(y, x, 0), tensor.at(y, x, 1), tensor.at(y, x, 2))};
                    for (int k = 0; k < kPoolSignals; ++k) {
                        sum[k] += s[k];
                        sq[k] += s[k] * s[k];
                        lo[k] = std::min(lo[k], s[k]);
                        hi[k] = std::max(hi[k], s[k]);
                    }
                }
            }
            const double count = static_cast<double>(rows.end - rows.begin) * (cols.end - cols.begin);
            const int cell = gy * kPoolCols + gx;
            for (int k = 0; k < kPoolSignals; ++k) {
                const double mean = sum[k] / count;
                const double var = std::max(0.0, sq[k] / count - mean * mean);
                double* out = f.data() + (cell * kPoolSignals + k) * kPoolStats;
                out[0] = mean;
                out[1] = std::sqrt(var);
                out[2] = lo[k];
                out[3] = hi[k];
            }
        }
    }
    for (double v : f) {
        if (!std::isfinite(v)) {
            throw NumericError("pooled_features: non-finite feature");
        }
    }
    return f;
}

std::vector<double> LinearHead::apply(const std::vector<double>& features) const {
    if (features.size() != static_cast<std::size_t>(kFeatureLength)) {
        throw ShapeError("LinearHead: feature length mismatch");
    }
    std::vector<double> out(static_cast<std::size_t>(outputs));
    for (int o = 0; o < outputs; ++o) {
        const float* w = weight.data() + static_cast<std::size_t>(o) * kFeatureLength;
        double acc = 0.0;
        for (int i = 0; i < kFeatureLength; ++i) {
            acc += static_cast<double>(w[i]) * features[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(o)] = acc + static_cast<double>(bias[static_cast<std::size_t>(o)]);
    }
    return out;
}

void PredictorParams::validate() const {
    for (const LinearHead* head : {&video, &wavelet}) {
        if (head->outputs < 1 || head->weight.size() != static_cast<std::size_t>(head->outputs) * kFeatureLength ||
            head->bias.size() != static_cast<std::size_t>(head->outputs)) {
            throw ShapeError("PredictorParams: inconsistent tensor sizes");
        }
        for (float v : head->weight) {
            if (!std::isfinite(v)) {
                throw NumericError("PredictorParams: non-finite weight");
            }
        }
        for (float v : head->bias) {
            if (!std::isfinite(v)) {
                throw NumericError("PredictorParams: non-finite bias");
            }
        }
    }
    if (video.outputs != wavelet.outputs) {
        throw ShapeError("PredictorParams: video and wavelet heads disagree on the output count");
    }
}

PredictorParams PredictorParams::constant(const std::vector<float>& bias) {
    PredictorParams p;
    for (LinearHead* head : {&p.video, &p.wavelet}) {
        head->outputs = static_cast<int>(bias.size());
        head->weight.assign(bias.size() * kFeatureLength, 0.0f);
        head->bias = bias;
    }
    return p;
}

FusionWeights predict_fusion_weights(const FrameTensor& frame, const FrameTensor& ll,
                                     const PredictorParams& params, MergeMode mode) {
    params.validate();
    auto a = params.video.apply(pooled_features(frame));
    auto b = params.wavelet.apply(pooled_features(ll));
    for (double v : a) {
        if (!std::isfinite(v)) {
            throw NumericError("predict_fusion_weights: non-finite video weight");
        }
    }
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw NumericError("predict_fusion_weights: non-finite wavelet weight");
        }
    }
    return merge_weights(std::move(a), std::move(b), mode);
}

// ----------------------------------------------------------------------------
// Parameter file

namespace {

void append_f32(std::vector<std::uint8_t>& out, const std::vector<float>& values) {
    for (float f : values) {
        const auto v = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i) {
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
}

std::vector<float> read_f32(const std::vector<std::uint8_t>& bytes, std::size_t offset, std::size_t count,
                            const std::string& name) {
    if (offset > bytes.size() || count > (bytes.size() - offset) / 4) {
        throw FormatError("predictor: tensor '" + name + "' extends past the end of its data file");
    }
    std::vector<float> out(count);
    const std::uint8_t* p = bytes.data() + offset;
    for (std::size_t i = 0; i < count; ++i, p += 4) {
        const std::uint32_t v = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
        out[i] = std::bit_cast<float>(v);
    }
    return out;
}

}  // namespace

void save_predictor(const PredictorParams& params, const std::filesystem::path& json_path) {
    params.validate();
    const auto bin_name = json_path.stem().string() + ".bin";
    std::vector<std::uint8_t> bin;
    nlohmann::json tensors = nlohmann::json::array();
    auto add = [&](const std::string& name, const std::vector<float>& v, std::vector<int> shape) {
        tensors.push_back({{"name", name}, {"path", bin_name}, {"shape", shape}, {"offset", bin.size()}});
        append_f32(bin, v);
    };
    const int k = params.outputs();
    add("video.weight", params.video.weight, {k, kFeatureLength});
    add("video.bias", params.video.bias, {k});
    add("wavelet.weight", params.wavelet.weight, {k, kFeatureLength});
    add("wavelet.bias", params.wavelet.bias, {k});
    const nlohmann::json index = {{"format", "wavelut-predictor"},
                                  {"version", 1},
                                  {"feature_length", kFeatureLength},
                                  {"outputs", k},
                                  {"tensors", tensors}};
    const auto dir = json_path.parent_path();
    write_file_bytes(dir / bin_name, bin);
    const std::string text = index.dump(2) + "\n";
    write_file_bytes(json_path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

PredictorParams load_predictor(const std::filesystem::path& json_path) {
    const auto text_bytes = read_file_bytes(json_path);
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(text_bytes.begin(), text_bytes.end());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(json_path.string() + ": " + e.what());
    }
    const std::string where = json_path.string() + ": ";
    try {
        if (index.at("format").get<std::string>() != "wavelut-predictor") {
            throw FormatError(where + "not a predictor index");
        }
        if (index.at("version").get<int>() != 1) {
            throw FormatError(where + "unsupported version");
        }
        if (index.at("feature_length").get<int>() != kFeatureLength) {
            throw FormatError(where + "feature length must be " + std::to_string(kFeatureLength));
        }
        const int k = index.at("outputs").get<int>();
        if (k < 1) {
            throw FormatError(where + "outputs must be >= 1");
        }
        PredictorParams p;
        p.video.outputs = k;
        p.wavelet.outputs = k;
        bool seen[4] = {};
        std::map<std::string, std::vector<std::uint8_t>> files;
        for (const auto& t : index.at("tensors")) {
            const auto name = t.at("name").get<std::string>();
            const auto shape = t.at("shape").get<std::vector<int>>();
            const auto rel = t.at("path").get<std::string>();
            const auto offset = t.at("offset").get<std::size_t>();
            std::size_t count = 1;
            for (int s : shape) {
                if (s < 0) {
                    throw FormatError(where + "negative tensor dimension");
                }
                count *= static_cast<std::size_t>(s);
            }
            if (!files.count(rel)) {
                files[rel] = read_file_bytes(json_path.parent_path() / rel);
            }
            auto values = read_f32(files[rel], offset, count, name);
            const bool is_weight = name.ends_with(".weight");
            const std::vector<int> expect = is_weight ? std::vector<int>{k, kFeatureLength} : std::vector<int>{k};
            if (shape != expect) {
                throw FormatError(where + "tensor '" + name + "' has the wrong shape");
            }
            int slot;
            if (name == "video.weight") {
                p.video.weight = std::move(values);
                slot = 0;
            } else if (name == "video.bias") {
                p.video.bias = std::move(values);
                slot = 1;
            } else if (name == "wavelet.weight") {
                p.wavelet.weight = std::move(values);
                slot = 2;
            } else if (name == "wavelet.bias") {
                p.wavelet.bias = std::move(values);
                slot = 3;
            } else {
                throw FormatError(where + "unknown tensor '" + name + "'");
            }
            seen[slot] = true;
        }
        if (!(seen[0] && seen[1] && seen[2] && seen[3])) {
            throw FormatError(where + "missing tensors");
        }
        try {
            p.validate();
        } catch (const Error& e) {
            throw FormatError(where + e.what());
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(where + e.what());
    }
}

// ----------------------------------------------------------------------------
// Default bases

std::vector<Lattice4D> make_default_bases(int n, int count) {
    if (count < 1) {
        throw InvalidArgument("make_default_bases: count must be >= 1");
    }
    std::vector<Lattice4D> bases;
    bases.push_back(make_identity_lattice4d(n));
    for (int k = 1; k < count; ++k) {
        Lattice4D lut = make_identity_lattice4d(n);
        const int level = (k + 1) / 2;
        const bool power = (k % 2) == 1;
        for (int s = 0; s < n; ++s) {
            // Strength 1 for the darkest prior, 0 for the brightest.
            const double dark = 1.0 - lut.axis(3)[s];
            const double gamma = 1.0 - dark * (1.0 - std::pow(0.5, level));
            const double gain = 1.0 + dark * (1.0 + level);
            for (int z = 0; z < n; ++z) {
                for (int y = 0; y < n; ++y) {
                    for (int x = 0; x < n; ++x) {
                        auto v = lut.entry({x, y, z, s});
                        for (auto& c : v) {
                            c = unit(power ? std::pow(static_cast<double>(c), gamma) : c * gain);
                        }
                        lut.set_entry({x, y, z, s}, v);
                    }
                }
            }
        }
        bases.push_back(std::move(lut));
    }
    return bases;
}

}  // namespace wavelut

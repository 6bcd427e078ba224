//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/losses.hpp"

#include <bit>
#include <cmath>
#include <complex>

#include <json.hpp>

#include "wavelut/dft.hpp"
#include "wavelut/lattice_io.hpp"
#include "wavelut/metrics.hpp"

namespace wavelut {

double clip_similarity(const EmbeddingVector& img, const EmbeddingVector& txt) {
    if (img.values.size() != txt.values.size()) {
        throw ShapeError("clip_similarity: embedding lengths differ");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        const double a = img.values[i];
        const double b = txt.values[i];
        dot += a * b;
        na += a * a;
        nb += b * b;
    }
    if (!(na > 0.0) || !(nb > 0.0) || !std::isfinite(na) || !std::isfinite(nb)) {
        throw NumericError("clip_similarity: zero or non-finite norm");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double loss_parameter_raw(double sim_r1, double sim_h1, double sim_r2, double sim_h2) {
    return std::abs(sim_r1 - sim_h1) + std::abs(sim_r2 - sim_h2);
}

double loss_parameter(double sim_r1, double sim_h1, double sim_r2, double sim_h2) {
    return std::clamp(loss_parameter_raw(sim_r1, sim_h1, sim_r2, sim_h2), 0.0, 1.0);
}

double varpi_from_embeddings(const EmbeddingVector& reference, const EmbeddingVector& enhanced,
                             const EmbeddingVector& prompt1, const EmbeddingVector& prompt2) {
    return loss_parameter(clip_similarity(reference, prompt1), clip_similarity(enhanced, prompt1),
                          clip_similarity(reference, prompt2), clip_similarity(enhanced, prompt2));
}

// ----------------------------------------------------------------------------
// Embedding files

std::vector<EmbeddingVector> load_embeddings(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    const std::string where = path.string() + ": ";
    std::vector<EmbeddingVector> out;
    std::size_t pos = 0;
    auto u32 = [&](std::size_t at) {
        return static_cast<std::uint32_t>(bytes[at]) | (static_cast<std::uint32_t>(bytes[at + 1]) << 8) |
               (static_cast<std::uint32_t>(bytes[at + 2]) << 16) | (static_cast<std::uint32_t>(bytes[at + 3]) << 24);
    };
    while (pos < bytes.size()) {
        if (bytes.size() - pos < 4) {
            throw FormatError(where + "truncated record header");
        }
        const std::size_t header_len = u32(pos);
        pos += 4;
        if (bytes.size() - pos < header_len) {
            throw FormatError(where + "truncated record header");
        }
        EmbeddingVector v;
        std::size_t length = 0;
        try {
            const auto header = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                                      bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
            v.name = header.at("name").get<std::string>();
            length = header.at("length").get<std::size_t>();
            const auto source = header.value("source", std::string("image"));
            if (source == "image") {
                v.source = EmbeddingSource::image;
            } else if (source == "text") {
                v.source = EmbeddingSource::text;
            } else {
                throw FormatError(where + "unknown embedding source '" + source + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(where + e.what());
        }
        pos += header_len;
        if ((bytes.size() - pos) / 4 < length) {
            throw FormatError(where + "truncated payload for '" + v.name + "'");
        }
        v.values.resize(length);
        for (std::size_t i = 0; i < length; ++i, pos += 4) {
            v.values[i] = std::bit_cast<float>(u32(pos));
            if (!std::isfinite(v.values[i])) {
                throw FormatError(where + "non-finite value in '" + v.name + "'");
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

void save_embeddings(const std::vector<EmbeddingVector>& vectors, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes;
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    };
    for (const auto& v : vectors) {
        const nlohmann::json header = {{"name", v.name},
                                       {"length", v.values.size()},
                                       {"source", v.source == EmbeddingSource::text ? "text" : "image"}};
        const std::string text = header.dump();
        put32(static_cast<std::uint32_t>(text.size()));
        bytes.insert(bytes.end(), text.begin(), text.end());
        for (float f : v.values) {
            put32(std::bit_cast<std::uint32_t>(f));
        }
    }
    write_file_bytes(path, bytes);
}

const EmbeddingVector& find_embedding(const std::vector<EmbeddingVector>& vectors, const std::string& name) {
    for (const auto& v : vectors) {
        if (v.name == name) {
            return v;
        }
    }
    throw InvalidArgument("no embedding named '" + name + "'");
}

// ----------------------------------------------------------------------------
// Image losses

double principal_arg(std::complex<double> z) {
    const double a = std::arg(z);
    return a == -kPi ? kPi : a;
}

double fourier_perceptual_loss(const FrameTensor& vh, const FrameTensor& vr, double varpi) {
    require_same_shape(vh, vr, "fourier_perceptual_loss");
    if (vh.empty()) {
        throw ShapeError("fourier_perceptual_loss: empty frames");
    }
    if (!(varpi >= 0.0 && varpi <= 1.0)) {
        throw InvalidArgument("fourier_perceptual_loss: varpi must lie in [0, 1]");
    }
    const int h = vh.height();
    const int w = vh.width();
    const int ch = vh.channels();
    const std::size_t n = vh.pixel_count();
    double amp = 0.0, pha = 0.0;
    std::vector<double> ph(n), pr(n);
    for (int c = 0; c < ch; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            ph[i] = vh.values()[i * ch + c];
            pr[i] = vr.values()[i * ch + c];
        }
        const auto fh = dft2(ph, h, w);
        const auto fr = dft2(pr, h, w);
        for (std::size_t i = 0; i < n; ++i) {
            const double ah = std::abs(fh[i]);
            const double ar = std::abs(fr[i]);
            const double qh = ah < kPhaseFloor ? 0.0 : principal_arg(fh[i]);
            const double qr = ar < kPhaseFloor ? 0.0 : principal_arg(fr[i]);
            amp += std::abs(ah - ar);
            pha += std::abs(qh - qr);
        }
    }
    const double bins = static_cast<double>(n) * ch;
    return varpi * (amp / bins) + (1.0 - varpi) * (pha / bins);
}

double fourier_perceptual_loss(const std::vector<FrameTensor>& vh, const std::vector<FrameTensor>& vr,
                               double varpi) {
    if (vh.size() != vr.size()) {
        throw InvalidArgument("fourier_perceptual_loss: sequences differ in length");
    }
    if (vh.empty()) {
        throw EmptySequenceError("fourier_perceptual_loss: empty sequences");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < vh.size(); ++i) {
        sum += fourier_perceptual_loss(vh[i], vr[i], varpi);
    }
    return sum / static_cast<double>(vh.size());
}

double charbonnier_loss(const FrameTensor& vh, const FrameTensor& vr, double epsilon) {
    require_same_shape(vh, vr, "charbonnier_loss");
    if (vh.empty()) {
        throw ShapeError("charbonnier_loss: empty frames");
    }
    const double e2 = epsilon * epsilon;
    double sum = 0.0;
    for (std::size_t i = 0; i < vh.size(); ++i) {
        const double d = static_cast<double>(vh.values()[i]) - vr.values()[i];
        sum += std::sqrt(d * d + e2);
    }
    return sum / static_cast<double>(vh.size());
}

double content_loss(const FrameTensor& vh, const FrameTensor& vr, const LossConstants& k) {
    const double charb = charbonnier_loss(vh, vr, k.epsilon);
    if (k.vartheta == 0.0) {
        return charb;
    }
    return charb + k.vartheta * (1.0 - ssim(vh, vr));
}

// ----------------------------------------------------------------------------
// Lattice regularizers

namespace {

// Calls fn(value_index, neighbour_value_index) for every forward
// difference along every axis.
template <typename Fn>
void for_each_forward_pair(const Lattice4D& lut, Fn&& fn) {
    const int n = lut.n();
    const std::size_t stride[4] = {3, 3 * static_cast<std::size_t>(n), 3 * static_cast<std::size_t>(n) * n,
                                   3 * static_cast<std::size_t>(n) * n * n};
    for (int s = 0; s < n; ++s) {
        for (int z = 0; z < n; ++z) {
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x) {
                    const int idx[4] = {x, y, z, s};
                    const std::size_t base = lut.entry_index({x, y, z, s}) * 3;
                    for (int d = 0; d < 4; ++d) {
                        if (idx[d] + 1 < n) {
                            fn(base, base + stride[d]);
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

double smooth_loss(const Lattice4D& lut, const FusionWeights& w) {
    const float* v = lut.values().data();
    double sum = 0.0;
    for_each_forward_pair(lut, [&](std::size_t i, std::size_t j) {
        for (int c = 0; c < 3; ++c) {
            const double d = static_cast<double>(v[j + c]) - v[i + c];
            sum += d * d;
        }
    });
    for (double m : w.merged) {
        sum += m * m;
    }
    return sum;
}

double monotone_loss(const Lattice4D& lut) {
    const float* v = lut.values().data();
    double sum = 0.0;
    for_each_forward_pair(lut, [&](std::size_t i, std::size_t j) {
        for (int c = 0; c < 3; ++c) {
            sum += std::max(0.0, static_cast<double>(v[i + c]) - v[j + c]);
        }
    });
    return sum;
}

LossBundle total_loss(double content, double perceptual, double smooth, double monotone, double varpi,
                      const LossConstants& k) {
    for (double v : {content, perceptual, smooth, monotone, varpi}) {
        if (!std::isfinite(v)) {
            throw NumericError("total_loss: non-finite component");
        }
    }
    LossBundle b;
    b.content = content;
    b.perceptual = perceptual;
    b.smooth = smooth;
    b.monotone = monotone;
    b.varpi = varpi;
    b.constants = k;
    b.total = content + perceptual + k.beta_s * smooth + k.beta_m * monotone;
    return b;
}

}  // namespace wavelut

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "wavelut/dft.hpp"
#include "wavelut/fusion.hpp"
#include "wavelut/interpolate.hpp"
#include "wavelut/metrics.hpp"
#include "wavelut/thread_pool.hpp"

namespace wavelut {

namespace {

using Plane = std::vector<double>;

struct FrameWork {
    std::vector<std::size_t> base;          // value index of the lowest corner, per pixel
    std::vector<std::array<double, 4>> off;  // per-axis offsets, per pixel
    Image<double> out;
    Image<double> grad;
    double charbonnier = 0.0;
    double ssim_term = 0.0;
    double fourier = 0.0;
};

std::array<std::size_t, 16> corner_offsets(int n) {
    const std::size_t stride[4] = {3, 3 * static_cast<std::size_t>(n), 3 * static_cast<std::size_t>(n) * n,
                                   3 * static_cast<std::size_t>(n) * n * n};
    std::array<std::size_t, 16> o{};
    for (int corner = 0; corner < 16; ++corner) {
        for (int d = 0; d < 4; ++d) {
            if ((corner >> d) & 1) {
                o[static_cast<std::size_t>(corner)] += stride[d];
            }
        }
    }
    return o;
}

inline double corner_weight(const std::array<double, 4>& o, int corner) {
    double w = 1.0;
    for (int d = 0; d < 4; ++d) {
        w *= ((corner >> d) & 1) ? o[static_cast<std::size_t>(d)] : 1.0 - o[static_cast<std::size_t>(d)];
    }
    return w;
}

void check_sample(const FitSample& s) {
    require_rgb(s.input, "fit sample");
    require_same_shape(s.input, s.reference, "fit sample");
    if (s.prior.height() != s.input.height() || s.prior.width() != s.input.width()) {
        throw ShapeError("fit sample: prior size differs from the frame");
    }
}

void forward(const Lattice4D& layout, std::span<const double> values, const std::array<std::size_t, 16>& corners,
             const FitSample& s, FrameWork& w) {
    const int h = s.input.height();
    const int wd = s.input.width();
    const std::size_t np = s.input.pixel_count();
    w.base.resize(np);
    w.off.resize(np);
    w.out = Image<double>(h, wd, 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < wd; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * wd + x;
            float q[4] = {s.input.at(y, x, 0), s.input.at(y, x, 1), s.input.at(y, x, 2), s.prior.at(y, x)};
            std::array<int, 4> idx{};
            for (int d = 0; d < 4; ++d) {
                clamp_unit(q[d]);
                const CellLocation loc = layout.axis(d).locate(q[d]);
                idx[static_cast<std::size_t>(d)] = loc.index;
                w.off[p][static_cast<std::size_t>(d)] = loc.offset;
            }
            const std::size_t base = layout.entry_index(idx) * 3;
            w.base[p] = base;
            double acc[3] = {0.0, 0.0, 0.0};
            for (int corner = 0; corner < 16; ++corner) {
                const double cw = corner_weight(w.off[p], corner);
                const double* v = values.data() + base + corners[static_cast<std::size_t>(corner)];
                acc[0] += cw * v[0];
                acc[1] += cw * v[1];
                acc[2] += cw * v[2];
            }
            for (int c = 0; c < 3; ++c) {
                w.out.at(y, x, c) = acc[c];
            }
        }
    }
}

Plane channel_plane(const Image<double>& img, int c) {
    Plane p(img.pixel_count());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = img.values()[i * 3 + static_cast<std::size_t>(c)];
    }
    return p;
}

Plane channel_plane(const FrameTensor& img, int c) {
    Plane p(img.pixel_count());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = img.values()[i * 3 + static_cast<std::size_t>(c)];
    }
    return p;
}

void add_channel(Image<double>& img, int c, const Plane& g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        img.values()[i * 3 + static_cast<std::size_t>(c)] += g[i];
    }
}

// Transpose of ssim_filter: maps an (h-10) x (w-10) plane back to h x w.
Plane filter_adjoint(const Plane& g, int h, int w) {
    const auto taps = ssim_taps();
    const int k = kSsimWindow;
    const int oh = h - k + 1;
    const int ow = w - k + 1;
    Plane cols(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < oh; ++y) {
        for (int t = 0; t < k; ++t) {
            const double tw = taps[static_cast<std::size_t>(t)];
            const double* src = g.data() + static_cast<std::size_t>(y) * ow;
            double* dst = cols.data() + static_cast<std::size_t>(y + t) * ow;
            for (int x = 0; x < ow; ++x) {
                dst[x] += tw * src[x];
            }
        }
    }
    Plane out(static_cast<std::size_t>(h) * w, 0.0);
    for (int y = 0; y < h; ++y) {
        const double* src = cols.data() + static_cast<std::size_t>(y) * ow;
        double* dst = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < ow; ++x) {
            for (int t = 0; t < k; ++t) {
                dst[x + t] += taps[static_cast<std::size_t>(t)] * src[x];
            }
        }
    }
    return out;
}

// Mean SSIM of one channel and, when `grad` is set, scale * dSSIM/da added
// into it.
double ssim_channel(const Plane& a, const Plane& b, int h, int w, double scale, Plane* grad) {
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    Plane aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const Plane mu_a = ssim_filter(a, h, w);
    const Plane mu_b = ssim_filter(b, h, w);
    const Plane s_aa = ssim_filter(aa, h, w);
    const Plane s_bb = ssim_filter(bb, h, w);
    const Plane s_ab = ssim_filter(ab, h, w);
    const std::size_t m = mu_a.size();
    Plane g_mu, g_aa, g_ab;
    if (grad) {
        g_mu.resize(m);
        g_aa.resize(m);
        g_ab.resize(m);
    }
    const double g = scale / static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double ma = mu_a[i];
        const double mb = mu_b[i];
        const double a1 = 2.0 * ma * mb + c1;
        const double a2 = 2.0 * (s_ab[i] - ma * mb) + c2;
        const double b1 = ma * ma + mb * mb + c1;
        const double b2 = (s_aa[i] - ma * ma) + (s_bb[i] - mb * mb) + c2;
        const double s = (a1 * a2) / (b1 * b2);
        sum += s;
        if (grad) {
            g_aa[i] = g * (-s / b2);
            g_ab[i] = g * (2.0 * s / a2);
            g_mu[i] = g * s * (2.0 * mb / a1 - 2.0 * mb / a2 - 2.0 * ma / b1 + 2.0 * ma / b2);
        }
    }
    if (grad) {
        const Plane t_mu = filter_adjoint(g_mu, h, w);
        const Plane t_aa = filter_adjoint(g_aa, h, w);
        const Plane t_ab = filter_adjoint(g_ab, h, w);
        for (std::size_t p = 0; p < a.size(); ++p) {
            (*grad)[p] += t_mu[p] + 2.0 * a[p] * t_aa[p] + b[p] * t_ab[p];
        }
    }
    return sum / static_cast<double>(m);
}

// Fourier loss contribution of one channel (already divided by the bin
// count of the frame) and its gradient.
double fourier_channel(const Plane& a, const Plane& b, int h, int w, double varpi, double bins, Plane* grad) {
    const auto fa = dft2(a, h, w);
    const auto fb = dft2(b, h, w);
    std::vector<std::complex<double>> g;
    if (grad) {
        g.assign(fa.size(), 0.0);
    }
    double amp = 0.0, pha = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        const double ah = std::abs(fa[i]);
        const double ar = std::abs(fb[i]);
        const double qh = ah < kPhaseFloor ? 0.0 : principal_arg(fa[i]);
        const double qr = ar < kPhaseFloor ? 0.0 : principal_arg(fb[i]);
        amp += std::abs(ah - ar);
        pha += std::abs(qh - qr);
        if (grad && ah >= kPhaseFloor) {
            const double sa = ah > ar ? 1.0 : (ah < ar ? -1.0 : 0.0);
            const double sp = qh > qr ? 1.0 : (qh < qr ? -1.0 : 0.0);
            const std::complex<double> unit = fa[i] / ah;
            g[i] = (varpi / bins) * sa * unit + ((1.0 - varpi) / bins) * sp * std::complex<double>(0.0, 1.0) *
                                                    fa[i] / (ah * ah);
        }
    }
    if (grad) {
        const Plane back = dft2_adjoint(g, h, w);
        for (std::size_t p = 0; p < back.size(); ++p) {
            (*grad)[p] += back[p];
        }
    }
    return varpi * (amp / bins) + (1.0 - varpi) * (pha / bins);
}

void frame_terms(const FitSample& s, const ObjectiveOptions& opt, bool want_grad, FrameWork& w) {
    const int h = w.out.height();
    const int wd = w.out.width();
    const auto& k = opt.constants;
    if (want_grad) {
        w.grad = Image<double>(h, wd, 3);
    }
    w.charbonnier = w.ssim_term = w.fourier = 0.0;
    if (opt.terms.charbonnier) {
        const double e2 = k.epsilon * k.epsilon;
        const double inv = 1.0 / static_cast<double>(w.out.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < w.out.size(); ++i) {
            const double d = w.out.values()[i] - static_cast<double>(s.reference.values()[i]);
            const double r = std::sqrt(d * d + e2);
            sum += r;
            if (want_grad) {
                w.grad.values()[i] += inv * d / r;
            }
        }
        w.charbonnier = sum * inv;
    }
    const bool use_ssim = opt.terms.ssim && k.vartheta != 0.0;
    if (use_ssim && (h < kSsimWindow || wd < kSsimWindow)) {
        throw InvalidArgument("objective: the SSIM term needs frames of at least 11 x 11");
    }
    if (!use_ssim && !opt.terms.fourier) {
        return;
    }
    const double bins = static_cast<double>(w.out.size());
    double ssim_sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const Plane a = channel_plane(w.out, c);
        const Plane b = channel_plane(s.reference, c);
        Plane g;
        if (want_grad) {
            g.assign(a.size(), 0.0);
        }
        if (use_ssim) {
            ssim_sum += ssim_channel(a, b, h, wd, -k.vartheta / 3.0, want_grad ? &g : nullptr);
        }
        if (opt.terms.fourier) {
            w.fourier += fourier_channel(a, b, h, wd, opt.varpi, bins, want_grad ? &g : nullptr);
        }
        if (want_grad) {
            add_channel(w.grad, c, g);
        }
    }
    if (use_ssim) {
        w.ssim_term = k.vartheta * (1.0 - ssim_sum / 3.0);
    }
}

template <typename Fn>
void for_each_forward_pair(int n, Fn&& fn) {
    const std::size_t stride[4] = {3, 3 * static_cast<std::size_t>(n), 3 * static_cast<std::size_t>(n) * n,
                                   3 * static_cast<std::size_t>(n) * n * n};
    std::size_t base = 0;
    for (int s = 0; s < n; ++s) {
        for (int z = 0; z < n; ++z) {
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x, base += 3) {
                    const int idx[4] = {x, y, z, s};
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

GradientResult evaluate_objective(const Lattice4D& layout, std::span<const double> values,
                                  const std::vector<FitSample>& batch, const ObjectiveOptions& opt, ThreadPool* pool,
                                  bool want_grad) {
    if (values.size() != layout.value_count()) {
        throw ShapeError("objective: value count does not match the lattice");
    }
    if (batch.empty()) {
        throw EmptySequenceError("objective: empty batch");
    }
    if (!(opt.varpi >= 0.0 && opt.varpi <= 1.0)) {
        throw InvalidArgument("objective: varpi must lie in [0, 1]");
    }
    for (const auto& s : batch) {
        check_sample(s);
    }
    const auto corners = corner_offsets(layout.n());
    std::vector<FrameWork> work(batch.size());
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            forward(layout, values, corners, batch[i], work[i]);
            frame_terms(batch[i], opt, want_grad, work[i]);
        }
    };
    if (pool != nullptr && pool->size() > 1 && batch.size() > 1) {
        pool->parallel_for(batch.size(), 1, run);
    } else {
        run(0, batch.size());
    }

    GradientResult r;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double charb = 0.0, ssim_term = 0.0, fourier = 0.0;
    for (const auto& w : work) {
        charb += w.charbonnier;
        ssim_term += w.ssim_term;
        fourier += w.fourier;
    }
    if (want_grad) {
        r.gradient.assign(values.size(), 0.0);
        for (const auto& w : work) {
            const std::size_t np = w.base.size();
            for (std::size_t p = 0; p < np; ++p) {
                const double g[3] = {w.grad.values()[p * 3] * inv_b, w.grad.values()[p * 3 + 1] * inv_b,
                                     w.grad.values()[p * 3 + 2] * inv_b};
                for (int corner = 0; corner < 16; ++corner) {
                    const double cw = corner_weight(w.off[p], corner);
                    double* dst = r.gradient.data() + w.base[p] + corners[static_cast<std::size_t>(corner)];
                    dst[0] += cw * g[0];
                    dst[1] += cw * g[1];
                    dst[2] += cw * g[2];
                }
            }
        }
    }

    const auto& k = opt.constants;
    double smooth = 0.0, mono = 0.0;
    if (opt.terms.smooth || opt.terms.monotone) {
        for_each_forward_pair(layout.n(), [&](std::size_t i, std::size_t j) {
            for (std::size_t c = 0; c < 3; ++c) {
                const double d = values[j + c] - values[i + c];
                if (opt.terms.smooth) {
                    smooth += d * d;
                    if (want_grad) {
                        r.gradient[j + c] += 2.0 * k.beta_s * d;
                        r.gradient[i + c] -= 2.0 * k.beta_s * d;
                    }
                }
                if (opt.terms.monotone && d < 0.0) {
                    mono -= d;
                    if (want_grad) {
                        r.gradient[i + c] += k.beta_m;
                        r.gradient[j + c] -= k.beta_m;
                    }
                }
            }
        });
    }

    r.parts.content = (charb + ssim_term) * inv_b;
    r.parts.perceptual = fourier * inv_b;
    r.parts.smooth = smooth;
    r.parts.monotone = mono;
    r.parts.varpi = opt.varpi;
    r.parts.constants = k;
    r.parts.total = r.parts.content + r.parts.perceptual + k.beta_s * smooth + k.beta_m * mono;
    r.loss = r.parts.total;
    return r;
}

std::vector<double> to_double(std::span<const float> v) { return {v.begin(), v.end()}; }

Lattice4D to_lattice(const Lattice4D& layout, const std::vector<double>& values) {
    std::vector<float> f(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        f[i] = static_cast<float>(values[i]);
    }
    return Lattice4D(layout.axes(), std::move(f));
}

FitSample crop_sample(const FitSample& s, int y0, int x0, int h, int w) {
    FitSample c{FrameTensor(h, w, 3), PriorMap(h, w, s.prior.kind), FrameTensor(h, w, 3)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                c.input.at(y, x, ch) = s.input.at(y0 + y, x0 + x, ch);
                c.reference.at(y, x, ch) = s.reference.at(y0 + y, x0 + x, ch);
            }
            c.prior.at(y, x) = s.prior.at(y0 + y, x0 + x);
        }
    }
    return c;
}

// Weighted least-squares non-decreasing fit of one line (pool adjacent
// violators).
void isotonic_line(std::vector<double>& x, const std::vector<double>& w) {
    std::vector<double> mean, weight;
    std::vector<std::size_t> count;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean.push_back(x[i]);
        weight.push_back(w[i]);
        count.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
            const std::size_t a = mean.size() - 2;
            const double wsum = weight[a] + weight.back();
            mean[a] = (mean[a] * weight[a] + mean.back() * weight.back()) / wsum;
            weight[a] = wsum;
            count[a] += count.back();
            mean.pop_back();
            weight.pop_back();
            count.pop_back();
        }
    }
    std::size_t k = 0;
    for (std::size_t b = 0; b < mean.size(); ++b) {
        for (std::size_t i = 0; i < count[b]; ++i) {
            x[k++] = mean[b];
        }
    }
}

// Isotonic regression along each axis in turn, weighted by `mass` (one
// weight per entry) or unweighted when `mass` is empty. The unweighted fit
// is order preserving, so lines ordered along earlier axes stay ordered and
// the result is non-decreasing along every axis.
void isotonic_sweep(std::vector<double>& v, int n, const std::vector<double>& mass) {
    const std::size_t stride[4] = {3, 3 * static_cast<std::size_t>(n), 3 * static_cast<std::size_t>(n) * n,
                                   3 * static_cast<std::size_t>(n) * n * n};
    std::vector<double> line(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    for (int d = 0; d < 4; ++d) {
        const std::size_t s = stride[d];
        const std::size_t block = s * static_cast<std::size_t>(n);
        for (std::size_t start = 0; start < v.size(); start += block) {
            for (std::size_t lane = start; lane < start + s; ++lane) {
                bool sorted = true;
                for (std::size_t k = 0; k < line.size(); ++k) {
                    line[k] = v[lane + k * s];
                    sorted = sorted && (k == 0 || line[k - 1] <= line[k]);
                    if (!mass.empty()) {
                        w[k] = mass[(lane + k * s) / 3];
                    }
                }
                if (sorted) {
                    continue;
                }
                isotonic_line(line, w);
                for (std::size_t k = 0; k < line.size(); ++k) {
                    v[lane + k * s] = line[k];
                }
            }
        }
    }
}

// A weighted sweep first, so entries the data never reaches follow the
// ones it does, then an unweighted sweep that makes the result exactly
// monotone.
void repair_monotone(std::vector<double>& v, int n, const std::vector<double>& mass) {
    isotonic_sweep(v, n, mass);
    isotonic_sweep(v, n, {});
}

// Total interpolation weight each entry receives over the data, plus a
// small floor so untouched entries still count.
std::vector<double> data_mass(const Lattice4D& layout, const std::vector<FitSample>& data) {
    const auto corners = corner_offsets(layout.n());
    std::vector<double> mass(layout.entry_count(), 0.0);
    const std::vector<double> zeros(layout.value_count(), 0.0);
    double total = 0.0;
    for (const auto& s : data) {
        FrameWork w;
        forward(layout, zeros, corners, s, w);
        for (std::size_t p = 0; p < w.base.size(); ++p) {
            for (int corner = 0; corner < 16; ++corner) {
                mass[(w.base[p] + corners[static_cast<std::size_t>(corner)]) / 3] += corner_weight(w.off[p], corner);
            }
        }
        total += static_cast<double>(w.base.size());
    }
    const double floor = 1e-6 * total / static_cast<double>(mass.size());
    for (double& m : mass) {
        m += floor;
    }
    return mass;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

GradientResult lattice_gradients(const Lattice4D& layout, std::span<const double> values,
                                 const std::vector<FitSample>& batch, const ObjectiveOptions& opt, ThreadPool* pool) {
    return evaluate_objective(layout, values, batch, opt, pool, true);
}

GradientResult lattice_gradients(const Lattice4D& lut, const std::vector<FitSample>& batch,
                                 const ObjectiveOptions& opt, ThreadPool* pool) {
    const auto v = to_double(lut.values());
    return evaluate_objective(lut, v, batch, opt, pool, true);
}

double lattice_objective(const Lattice4D& layout, std::span<const double> values,
                         const std::vector<FitSample>& batch, const ObjectiveOptions& opt, ThreadPool* pool) {
    return evaluate_objective(layout, values, batch, opt, pool, false).loss;
}

OptimizerKind parse_optimizer(const std::string& text) {
    if (text == "gd") {
        return OptimizerKind::gd;
    }
    if (text == "momentum") {
        return OptimizerKind::momentum;
    }
    if (text == "adam") {
        return OptimizerKind::adam;
    }
    throw InvalidArgument("unknown optimizer '" + text + "' (expected gd, momentum or adam)");
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::gd:
            return "gd";
        case OptimizerKind::momentum:
            return "momentum";
        case OptimizerKind::adam:
            return "adam";
    }
    return "adam";
}

void FitConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("fit: learning rate must be positive");
    }
    if (steps < 1) {
        throw InvalidArgument("fit: steps must be >= 1");
    }
    if (batch_frames < 1) {
        throw InvalidArgument("fit: batch_frames must be >= 1");
    }
    if (crop < 1) {
        throw InvalidArgument("fit: crop must be >= 1");
    }
    if (use_ssim && constants.vartheta != 0.0 && crop < kSsimWindow) {
        throw InvalidArgument("fit: the SSIM term needs crops of at least 11");
    }
    if (!(varpi >= 0.0 && varpi <= 1.0)) {
        throw InvalidArgument("fit: varpi must lie in [0, 1]");
    }
    if (checkpoint_every < 1) {
        throw InvalidArgument("fit: checkpoint_every must be >= 1");
    }
    if (!(momentum >= 0.0 && momentum < 1.0) || !(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
        !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_epsilon > 0.0)) {
        throw InvalidArgument("fit: optimizer constants out of range");
    }
    if (!(constants.epsilon > 0.0) || constants.beta_s < 0.0 || constants.beta_m < 0.0 || constants.vartheta < 0.0) {
        throw InvalidArgument("fit: loss constants out of range");
    }
}

ObjectiveOptions FitConfig::objective() const {
    ObjectiveOptions o;
    o.constants = constants;
    o.varpi = varpi;
    o.terms.charbonnier = true;
    o.terms.ssim = use_ssim && constants.vartheta != 0.0;
    o.terms.fourier = use_fourier;
    o.terms.smooth = true;
    o.terms.monotone = true;
    return o;
}

FitResult fit_lattice(const Lattice4D& init, const std::vector<FitSample>& data, const FitConfig& cfg,
                      ThreadPool* pool) {
    cfg.validate();
    if (data.empty()) {
        throw EmptySequenceError("fit: no training samples");
    }
    for (const auto& s : data) {
        check_sample(s);
    }
    init.check_finite();
    const ObjectiveOptions opt = cfg.objective();

    std::vector<double> values = to_double(init.values());
    std::vector<double> best = values;
    std::vector<double> m1(values.size(), 0.0), m2(values.size(), 0.0);
    const std::vector<double> mass = cfg.monotone_repair ? data_mass(init, data) : std::vector<double>{};

    FitResult result;
    result.initial_loss = lattice_objective(init, values, data, opt, pool);
    if (!std::isfinite(result.initial_loss)) {
        throw FitDivergence("fit: initial loss is not finite", 0, init);
    }
    result.best_loss = result.initial_loss;
    result.best_step = 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.history.push_back({0, nan, result.initial_loss, result.best_loss});

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = order.size();
    int last_checkpoint = 0;
    std::vector<double> last_checkpoint_values = values;

    for (int step = 1; step <= cfg.steps; ++step) {
        std::vector<FitSample> batch;
        batch.reserve(static_cast<std::size_t>(cfg.batch_frames));
        for (int b = 0; b < cfg.batch_frames; ++b) {
            if (cursor == order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            const FitSample& s = data[order[cursor++]];
            const int ch = std::min(cfg.crop, s.input.height());
            const int cw = std::min(cfg.crop, s.input.width());
            std::uniform_int_distribution<int> uy(0, s.input.height() - ch);
            std::uniform_int_distribution<int> ux(0, s.input.width() - cw);
            const int y0 = uy(rng);
            const int x0 = ux(rng);
            batch.push_back(crop_sample(s, y0, x0, ch, cw));
        }

        GradientResult g = lattice_gradients(init, values, batch, opt, pool);
        if (!std::isfinite(g.loss) || !all_finite(g.gradient)) {
            throw FitDivergence("fit: loss became non-finite at step " + std::to_string(step), last_checkpoint,
                                to_lattice(init, last_checkpoint_values));
        }

        const double lr = cfg.learning_rate;
        switch (cfg.optimizer) {
            case OptimizerKind::gd:
                for (std::size_t i = 0; i < values.size(); ++i) {
                    values[i] -= lr * g.gradient[i];
                }
                break;
            case OptimizerKind::momentum:
                for (std::size_t i = 0; i < values.size(); ++i) {
                    m1[i] = cfg.momentum * m1[i] + g.gradient[i];
                    values[i] -= lr * m1[i];
                }
                break;
            case OptimizerKind::adam: {
                const double c1 = 1.0 - std::pow(cfg.adam_beta1, step);
                const double c2 = 1.0 - std::pow(cfg.adam_beta2, step);
                for (std::size_t i = 0; i < values.size(); ++i) {
                    const double gi = g.gradient[i];
                    m1[i] = cfg.adam_beta1 * m1[i] + (1.0 - cfg.adam_beta1) * gi;
                    m2[i] = cfg.adam_beta2 * m2[i] + (1.0 - cfg.adam_beta2) * gi * gi;
                    values[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + cfg.adam_epsilon);
                }
                break;
            }
        }
        for (double& v : values) {
            v = std::clamp(v, 0.0, 1.0);
        }
        if (cfg.monotone_repair) {
            repair_monotone(values, init.n(), mass);
        }

        FitHistoryRow row{step, g.loss, nan, result.best_loss};
        if (step % cfg.checkpoint_every == 0 || step == cfg.steps) {
            const double loss = lattice_objective(init, values, data, opt, pool);
            if (!std::isfinite(loss)) {
                throw FitDivergence("fit: checkpoint loss became non-finite at step " + std::to_string(step),
                                    last_checkpoint, to_lattice(init, last_checkpoint_values));
            }
            last_checkpoint = step;
            last_checkpoint_values = values;
            row.checkpoint_loss = loss;
            if (loss < result.best_loss) {
                result.best_loss = loss;
                result.best_step = step;
                best = values;
            }
            row.best_loss = result.best_loss;
        }
        result.history.push_back(row);
    }
    result.lattice = to_lattice(init, best);
    return result;
}

std::string history_csv(const std::vector<FitHistoryRow>& history) {
    std::ostringstream out;
    out.precision(10);
    out << "step,batch_loss,checkpoint_loss,best_loss\n";
    auto field = [&out](double v) {
        if (std::isfinite(v)) {
            out << v;
        }
    };
    for (const auto& r : history) {
        out << r.step << ',';
        field(r.batch_loss);
        out << ',';
        field(r.checkpoint_loss);
        out << ',';
        field(r.best_loss);
        out << '\n';
    }
    return out.str();
}

// ----------------------------------------------------------------------------
// Predictor

namespace {

// Least-squares merged weights reproducing `reference` from the basis outputs.
std::vector<double> best_basis_weights(const std::vector<FrameTensor>& outputs, const FrameTensor& reference) {
    const auto k = static_cast<Eigen::Index>(outputs.size());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < reference.size(); ++i) {
        for (Eigen::Index a = 0; a < k; ++a) {
            const double oa = outputs[static_cast<std::size_t>(a)].values()[i];
            rhs(a) += oa * reference.values()[i];
            for (Eigen::Index b = 0; b < k; ++b) {
                gram(a, b) += oa * outputs[static_cast<std::size_t>(b)].values()[i];
            }
        }
    }
    const double scale = gram.trace() / static_cast<double>(k);
    gram.diagonal().array() += 1e-9 * std::max(scale, 1.0);
    const Eigen::VectorXd w = gram.ldlt().solve(rhs);
    return {w.data(), w.data() + k};
}

LinearHead ridge_head(const std::vector<std::vector<double>>& features, const std::vector<std::vector<double>>& targets,
                      double ridge) {
    const auto rows = static_cast<Eigen::Index>(features.size());
    const auto cols = static_cast<Eigen::Index>(kFeatureLength);
    const auto outs = static_cast<Eigen::Index>(targets.front().size());
    Eigen::MatrixXd x(rows, cols);
    Eigen::MatrixXd y(rows, outs);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            x(r, c) = features[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        for (Eigen::Index c = 0; c < outs; ++c) {
            y(r, c) = targets[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const Eigen::RowVectorXd y_mean = y.colwise().mean();
    const Eigen::MatrixXd xc = x.rowwise() - x_mean;
    const Eigen::MatrixXd yc = y.rowwise() - y_mean;
    Eigen::MatrixXd normal = xc.transpose() * xc;
    normal.diagonal().array() += ridge;
    const Eigen::MatrixXd w = normal.ldlt().solve(xc.transpose() * yc);  // cols x outs
    const Eigen::RowVectorXd b = y_mean - x_mean * w;

    LinearHead head;
    head.outputs = static_cast<int>(outs);
    head.weight.resize(static_cast<std::size_t>(outs * cols));
    head.bias.resize(static_cast<std::size_t>(outs));
    for (Eigen::Index o = 0; o < outs; ++o) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            head.weight[static_cast<std::size_t>(o * cols + c)] = static_cast<float>(w(c, o));
        }
        head.bias[static_cast<std::size_t>(o)] = static_cast<float>(b(o));
    }
    return head;
}

}  // namespace

PredictorParams fit_predictor(const std::vector<Lattice4D>& bases, const std::vector<PredictorFitPair>& pairs,
                              MergeMode mode, double ridge) {
    if (bases.empty()) {
        throw InvalidArgument("fit_predictor: no basis lattices");
    }
    if (pairs.empty()) {
        throw EmptySequenceError("fit_predictor: no training pairs");
    }
    if (!(ridge >= 0.0)) {
        throw InvalidArgument("fit_predictor: ridge must be >= 0");
    }
    std::vector<std::vector<double>> video_features, wavelet_features, targets;
    for (const auto& pair : pairs) {
        require_rgb(pair.input, "fit_predictor");
        require_same_shape(pair.input, pair.reference, "fit_predictor");
        const FramePrior prior = frame_prior(pair.input);
        std::vector<FrameTensor> outputs;
        outputs.reserve(bases.size());
        for (const auto& b : bases) {
            outputs.push_back(quadrilinear_apply(b, pair.input, prior.fused.fused));
        }
        auto w = best_basis_weights(outputs, pair.reference);
        if (mode == MergeMode::sum) {
            for (double& v : w) {
                v *= 0.5;
            }
        }
        targets.push_back(std::move(w));
        video_features.push_back(pooled_features(pair.input));
        wavelet_features.push_back(pooled_features(prior.ll));
    }
    PredictorParams p;
    p.video = ridge_head(video_features, targets, ridge);
    p.wavelet = ridge_head(wavelet_features, targets, ridge);
    p.validate();
    return p;
}

}  // namespace wavelut

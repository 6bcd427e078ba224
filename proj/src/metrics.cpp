//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace wavelut {

double psnr(const FrameTensor& a, const FrameTensor& b, double peak) {
    require_same_shape(a, b, "psnr");
    if (!(peak > 0.0)) {
        throw InvalidArgument("psnr: peak must be positive");
    }
    if (a.empty()) {
        throw ShapeError("psnr: empty frames");
    }
    const auto va = a.values();
    const auto vb = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        const double d = static_cast<double>(va[i]) - vb[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(va.size());
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(peak * peak / mse);
}

std::array<double, kSsimWindow> ssim_taps() {
    std::array<double, kSsimWindow> t{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - kSsimWindow / 2;
        t[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
        sum += t[static_cast<std::size_t>(i)];
    }
    for (auto& v : t) {
        v /= sum;
    }
    return t;
}

std::vector<double> ssim_filter(const std::vector<double>& plane, int h, int w) {
    const auto taps = ssim_taps();
    const int oh = h - kSsimWindow + 1;
    const int ow = w - kSsimWindow + 1;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y) {
        const double* src = plane.data() + static_cast<std::size_t>(y) * w;
        double* dst = rows.data() + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                acc += taps[static_cast<std::size_t>(k)] * src[x + k];
            }
            dst[x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y) {
        double* dst = out.data() + static_cast<std::size_t>(y) * ow;
        for (int k = 0; k < kSsimWindow; ++k) {
            const double t = taps[static_cast<std::size_t>(k)];
            const double* src = rows.data() + static_cast<std::size_t>(y + k) * ow;
            for (int x = 0; x < ow; ++x) {
                dst[x] += t * src[x];
            }
        }
    }
    return out;
}

double ssim(const FrameTensor& a, const FrameTensor& b, double peak) {
    require_same_shape(a, b, "ssim");
    if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
        throw InvalidArgument("ssim: frames must be at least 11 x 11");
    }
    if (!(peak > 0.0)) {
        throw InvalidArgument("ssim: peak must be positive");
    }
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const int h = a.height();
    const int w = a.width();
    const std::size_t n = a.pixel_count();
    const int ch = a.channels();
    double total = 0.0;
    std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
    for (int c = 0; c < ch; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = a.values()[i * ch + c];
            const double y = b.values()[i * ch + c];
            pa[i] = x;
            pb[i] = y;
            paa[i] = x * x;
            pbb[i] = y * y;
            pab[i] = x * y;
        }
        const auto ma = ssim_filter(pa, h, w);
        const auto mb = ssim_filter(pb, h, w);
        const auto saa = ssim_filter(paa, h, w);
        const auto sbb = ssim_filter(pbb, h, w);
        const auto sab = ssim_filter(pab, h, w);
        double sum = 0.0;
        for (std::size_t i = 0; i < ma.size(); ++i) {
            const double va = saa[i] - ma[i] * ma[i];
            const double vb = sbb[i] - mb[i] * mb[i];
            const double cov = sab[i] - ma[i] * mb[i];
            sum += ((2.0 * (ma[i] * mb[i]) + c1) * (2.0 * cov + c2)) /
                   ((ma[i] * ma[i] + mb[i] * mb[i] + c1) * (va + vb + c2));
        }
        total += sum / static_cast<double>(ma.size());
    }
    return total / ch;
}

namespace {

nlohmann::json number_or_inf(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

}  // namespace

std::string MetricReport::to_csv() const {
    std::ostringstream out;
    out.precision(10);
    out << "frame_index,psnr_db,ssim\n";
    for (std::size_t i = 0; i < per_frame.size(); ++i) {
        out << i << ',' << per_frame[i].first << ',' << per_frame[i].second << '\n';
    }
    out << "mean," << psnr_db << ',' << ssim << '\n';
    return out.str();
}

std::string MetricReport::to_json() const {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& [p, s] : per_frame) {
        frames.push_back({{"psnr_db", number_or_inf(p)}, {"ssim", s}});
    }
    const nlohmann::json j = {{"psnr_db", number_or_inf(psnr_db)}, {"ssim", ssim}, {"per_frame", frames}};
    return j.dump(2);
}

MetricReport evaluate(const std::vector<FrameTensor>& a, const std::vector<FrameTensor>& b, double peak) {
    if (a.size() != b.size()) {
        throw InvalidArgument("evaluate: sequences differ in length");
    }
    if (a.empty()) {
        throw EmptySequenceError("evaluate: empty sequences");
    }
    MetricReport r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.per_frame.emplace_back(psnr(a[i], b[i], peak), ssim(a[i], b[i], peak));
        r.psnr_db += r.per_frame.back().first;
        r.ssim += r.per_frame.back().second;
    }
    r.psnr_db /= static_cast<double>(a.size());
    r.ssim /= static_cast<double>(a.size());
    return r;
}

}  // namespace wavelut

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/dft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "wavelut/error.hpp"

namespace wavelut {

namespace {

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

Buffer allocate(std::size_t n) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!p) {
        throw std::bad_alloc();
    }
    return Buffer(p);
}

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are created once per (h, w, direction) and kept.
class PlanCache {
public:
    fftw_plan get(int h, int w, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(h, w, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) {
            return it->second;
        }
        const std::size_t n = static_cast<std::size_t>(h) * w;
        auto in = allocate(n);
        auto out = allocate(n);
        fftw_plan plan = fftw_plan_dft_2d(h, w, in.get(), out.get(), sign, FFTW_ESTIMATE);
        if (!plan) {
            throw NumericError("dft2: FFTW planning failed");
        }
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void check_dims(std::size_t size, int h, int w, const char* who) {
    if (h <= 0 || w <= 0 || size != static_cast<std::size_t>(h) * w) {
        throw ShapeError(std::string(who) + ": plane size does not match h x w");
    }
}

}  // namespace

std::vector<std::complex<double>> dft2(const std::vector<double>& plane, int h, int w) {
    check_dims(plane.size(), h, w, "dft2");
    const std::size_t n = plane.size();
    fftw_plan plan = plan_cache().get(h, w, FFTW_FORWARD);
    auto in = allocate(n);
    auto out = allocate(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = plane[i];
        in[i][1] = 0.0;
    }
    fftw_execute_dft(plan, in.get(), out.get());
    std::vector<std::complex<double>> result(n);
    for (std::size_t i = 0; i < n; ++i) {
        result[i] = {out[i][0], out[i][1]};
    }
    return result;
}

std::vector<double> dft2_adjoint(const std::vector<std::complex<double>>& spectrum, int h, int w) {
    check_dims(spectrum.size(), h, w, "dft2_adjoint");
    const std::size_t n = spectrum.size();
    fftw_plan plan = plan_cache().get(h, w, FFTW_BACKWARD);
    auto in = allocate(n);
    auto out = allocate(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = spectrum[i].real();
        in[i][1] = spectrum[i].imag();
    }
    fftw_execute_dft(plan, in.get(), out.get());
    std::vector<double> result(n);
    for (std::size_t i = 0; i < n; ++i) {
        result[i] = out[i][0];
    }
    return result;
}

}  // namespace wavelut

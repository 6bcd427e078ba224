//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavelut/error.hpp"

namespace wavelut {

/// Interleaved H x W x C image. Element (y, x, c) lives at
/// ((y * width) + x) * channels + c.
template <typename T>
class Image {
public:
    Image() = default;

    Image(int height, int width, int channels, T fill = T{})
        : height_(height), width_(width), channels_(channels) {
        if (height < 0 || width < 0 || channels <= 0) {
            throw ShapeError("Image: invalid dimensions");
        }
        data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
    }

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height_) * width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool same_shape(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

    T& at(int y, int x, int c) noexcept { return data_[index(y, x, c)]; }
    T at(int y, int x, int c) const noexcept { return data_[index(y, x, c)]; }

    T* row(int y) noexcept { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }
    const T* row(int y) const noexcept {
        return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
    }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool operator==(const Image&) const = default;

private:
    std::size_t index(int y, int x, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

/// Video frame with values nominally in [0, 1].
using FrameTensor = Image<float>;

enum class PriorKind { intensity, lighting, fused };

std::string_view to_string(PriorKind kind) noexcept;

/// Single-channel H x W scalar field in [0, 1].
struct PriorMap {
    Image<float> values;
    PriorKind kind = PriorKind::intensity;

    PriorMap() = default;
    PriorMap(int height, int width, PriorKind k, float fill = 0.0f)
        : values(height, width, 1, fill), kind(k) {}
    PriorMap(Image<float> v, PriorKind k) : values(std::move(v)), kind(k) {
        if (values.channels() != 1) {
            throw ShapeError("PriorMap: expected a single-channel image");
        }
    }

    int height() const noexcept { return values.height(); }
    int width() const noexcept { return values.width(); }
    float at(int y, int x) const noexcept { return values.at(y, x, 0); }
    float& at(int y, int x) noexcept { return values.at(y, x, 0); }
    std::span<const float> data() const noexcept { return values.values(); }
    std::span<float> data() noexcept { return values.values(); }
};

inline void require_same_shape(const FrameTensor& a, const FrameTensor& b, const char* who) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(who) + ": frame shapes differ");
    }
}

inline void require_rgb(const FrameTensor& f, const char* who) {
    if (f.channels() != 3) {
        throw ShapeError(std::string(who) + ": expected a 3-channel frame");
    }
    if (f.empty()) {
        throw ShapeError(std::string(who) + ": empty frame");
    }
}

}  // namespace wavelut

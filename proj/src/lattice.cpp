//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/lattice.hpp"

#include "wavelut/simd/dispatch.hpp"

namespace wavelut {

CoordinateAxis::CoordinateAxis(std::vector<float> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
        throw InvalidArgument("CoordinateAxis: at least two coordinates required");
    }
    if (coords_.front() != 0.0f || coords_.back() != 1.0f) {
        throw InvalidArgument("CoordinateAxis: coordinates must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < coords_.size(); ++i) {
        if (!(coords_[i] > coords_[i - 1])) {
            throw InvalidArgument("CoordinateAxis: coordinates must be strictly increasing");
        }
    }
    finalize();
}

CoordinateAxis CoordinateAxis::uniform(int n) {
    if (n < 2) {
        throw InvalidArgument("CoordinateAxis: n must be >= 2, got " + std::to_string(n));
    }
    std::vector<float> c(static_cast<std::size_t>(n));
    const float last = static_cast<float>(n - 1);
    for (int k = 0; k < n; ++k) {
        c[static_cast<std::size_t>(k)] = static_cast<float>(k) / last;
    }
    return CoordinateAxis(std::move(c));
}

void CoordinateAxis::finalize() {
    const int n = size();
    scale_ = static_cast<float>(n - 1);
    inv_width_.resize(static_cast<std::size_t>(n - 1));
    for (int k = 0; k + 1 < n; ++k) {
        inv_width_[static_cast<std::size_t>(k)] = 1.0f / (coords_[k + 1] - coords_[k]);
    }
    uniform_ = true;
    for (int k = 0; k < n; ++k) {
        if (coords_[static_cast<std::size_t>(k)] != static_cast<float>(k) / scale_) {
            uniform_ = false;
            break;
        }
    }
}

CellLocation locate_index(const CoordinateAxis& axis, float v, bool* clamped) {
    const bool was_clamped = clamp_unit(v);
    if (clamped != nullptr) {
        *clamped = was_clamped;
    }
    return axis.locate(v);
}

// ----------------------------------------------------------------------------
// Lattice

namespace {

std::size_t power(int n, int dims) {
    std::size_t p = 1;
    for (int d = 0; d < dims; ++d) {
        p *= static_cast<std::size_t>(n);
    }
    return p;
}

}  // namespace

template <int Dims>
Lattice<Dims>::Lattice(int n) {
    if (n < 2) {
        throw InvalidArgument("Lattice: n must be >= 2, got " + std::to_string(n));
    }
    n_ = n;
    entries_ = power(n, Dims);
    for (auto& a : axes_) {
        a = CoordinateAxis::uniform(n);
    }
    storage_.assign(entries_ * 3 + kPadding, 0.0f);
}

template <int Dims>
Lattice<Dims>::Lattice(std::array<CoordinateAxis, Dims> axes, std::vector<float> values)
    : axes_(std::move(axes)) {
    n_ = axes_[0].size();
    if (n_ < 2) {
        throw InvalidArgument("Lattice: axes must have at least two coordinates");
    }
    for (const auto& a : axes_) {
        if (a.size() != n_) {
            throw ShapeError("Lattice: all axes must have the same number of coordinates");
        }
    }
    entries_ = power(n_, Dims);
    if (values.size() != entries_ * 3) {
        throw ShapeError("Lattice: expected " + std::to_string(entries_ * 3) + " values, got " +
                         std::to_string(values.size()));
    }
    storage_ = std::move(values);
    storage_.resize(entries_ * 3 + kPadding, 0.0f);
    check_finite();
}

template <int Dims>
bool Lattice<Dims>::uniform_axes() const noexcept {
    return std::all_of(axes_.begin(), axes_.end(), [](const CoordinateAxis& a) { return a.is_uniform(); });
}

template <int Dims>
void Lattice<Dims>::check_finite() const {
    for (float v : values()) {
        if (!std::isfinite(v)) {
            throw NumericError("Lattice: non-finite stored value");
        }
    }
}

template class Lattice<3>;
template class Lattice<4>;

Lattice3D make_identity_lattice3d(int n) {
    Lattice3D lut(n);
    const auto& ax = lut.axes();
    for (int z = 0; z < n; ++z) {
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                lut.set_entry({x, y, z}, {ax[0][x], ax[1][y], ax[2][z]});
            }
        }
    }
    return lut;
}

Lattice4D make_identity_lattice4d(const std::array<CoordinateAxis, 4>& axes) {
    const int n = axes[0].size();
    std::vector<float> values(power(n, 4) * 3);
    Lattice4D lut(axes, std::move(values));
    for (int s = 0; s < n; ++s) {
        for (int z = 0; z < n; ++z) {
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x) {
                    lut.set_entry({x, y, z, s}, {axes[0][x], axes[1][y], axes[2][z]});
                }
            }
        }
    }
    return lut;
}

Lattice4D make_identity_lattice4d(int n) {
    const auto axis = CoordinateAxis::uniform(n);
    return make_identity_lattice4d({axis, axis, axis, axis});
}

Lattice4D extend_to_4d(const Lattice3D& lut, int prior_points) {
    if (prior_points != lut.n()) {
        throw ShapeError("extend_to_4d: prior axis must have the same number of points as the 3D lattice");
    }
    const int n = lut.n();
    const auto& a = lut.axes();
    Lattice4D out({a[0], a[1], a[2], CoordinateAxis::uniform(n)}, std::vector<float>(power(n, 4) * 3));
    for (int s = 0; s < n; ++s) {
        for (int z = 0; z < n; ++z) {
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x) {
                    out.set_entry({x, y, z, s}, lut.entry({x, y, z}));
                }
            }
        }
    }
    return out;
}

// ----------------------------------------------------------------------------
// Basis fusion

MergeMode parse_merge_mode(const std::string& text) {
    if (text == "mean") {
        return MergeMode::mean;
    }
    if (text == "sum") {
        return MergeMode::sum;
    }
    throw InvalidArgument("unknown merge mode '" + text + "' (expected mean or sum)");
}

std::string to_string(MergeMode mode) { return mode == MergeMode::mean ? "mean" : "sum"; }

FusionWeights merge_weights(std::vector<double> a, std::vector<double> b, MergeMode mode) {
    if (a.size() != b.size()) {
        throw ShapeError("merge_weights: weight vectors differ in length");
    }
    FusionWeights w{std::move(a), std::move(b), {}};
    w.merged.resize(w.a.size());
    for (std::size_t k = 0; k < w.a.size(); ++k) {
        if (!std::isfinite(w.a[k]) || !std::isfinite(w.b[k])) {
            throw NumericError("merge_weights: non-finite weight");
        }
        w.merged[k] = mode == MergeMode::mean ? 0.5 * (w.a[k] + w.b[k]) : w.a[k] + w.b[k];
    }
    return w;
}

FusionWeights merged_only(std::vector<double> merged) {
    FusionWeights w;
    w.merged = std::move(merged);
    return w;
}

Lattice4D fuse_basis_luts(std::span<const Lattice4D> bases, const FusionWeights& weights) {
    if (bases.empty()) {
        throw InvalidArgument("fuse_basis_luts: no basis lattices");
    }
    if (weights.merged.size() != bases.size()) {
        throw ShapeError("fuse_basis_luts: " + std::to_string(weights.merged.size()) +
                         " weights for " + std::to_string(bases.size()) + " bases");
    }
    const auto& first = bases.front();
    std::vector<const float*> sources;
    sources.reserve(bases.size());
    for (const auto& b : bases) {
        if (b.n() != first.n()) {
            throw ShapeError("fuse_basis_luts: bases differ in n");
        }
        if (b.axes() != first.axes()) {
            throw ShapeError("fuse_basis_luts: bases differ in sampling axes");
        }
        sources.push_back(b.data());
    }
    for (double w : weights.merged) {
        if (!std::isfinite(w)) {
            throw NumericError("fuse_basis_luts: non-finite weight");
        }
    }
    std::vector<float> values(first.value_count());
    simd::kernels().weighted_sum(sources.data(), weights.merged.data(), sources.size(), values.data(),
                                 values.size());
    return Lattice4D(first.axes(), std::move(values));
}

}  // namespace wavelut

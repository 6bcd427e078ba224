//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wavelut/fusion.hpp"
#include "wavelut/thread_pool.hpp"

using namespace wavelut;

namespace {

PriorMap map_from(const std::vector<float>& v, int h, int w, PriorKind k) {
    PriorMap m(h, w, k);
    std::copy(v.begin(), v.end(), m.data().begin());
    return m;
}

PriorMap transformed(const PriorMap& m, float gain, float bias, PriorKind k) {
    PriorMap out(m.height(), m.width(), k);
    for (std::size_t i = 0; i < m.data().size(); ++i) {
        out.data()[i] = gain * m.data()[i] + bias;
    }
    return out;
}

double cosine_oracle(const PriorMap& a, const PriorMap& b) {
    const auto n = static_cast<double>(a.data().size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        ma += a.data()[i] / n;
        mb += b.data()[i] / n;
    }
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        dot += (a.data()[i] - ma) * (b.data()[i] - mb);
        na += (a.data()[i] - ma) * (a.data()[i] - ma);
        nb += (b.data()[i] - mb) * (b.data()[i] - mb);
    }
    return dot / std::sqrt(na) / std::sqrt(nb);
}

const std::vector<float> kFixedA{0.10f, 0.20f, 0.30f, 0.40f, 0.50f, 0.60f, 0.70f, 0.80f,
                                 0.15f, 0.25f, 0.35f, 0.45f, 0.55f, 0.65f, 0.75f, 0.85f};
const std::vector<float> kFixedB{0.90f, 0.10f, 0.40f, 0.30f, 0.20f, 0.70f, 0.60f, 0.50f,
                                 0.05f, 0.95f, 0.45f, 0.35f, 0.25f, 0.15f, 0.80f, 0.65f};

}  // namespace

TEST_CASE("similarity") {
    std::mt19937_64 rng(97);
    const auto a = oracle::random_prior(rng, 6, 7);
    CHECK(similarity(a, a) == 1.0);
    const auto inv = transformed(a, -1.0f, 1.0f, PriorKind::lighting);
    CHECK(similarity(a, inv) == doctest::Approx(-1.0).epsilon(1e-12));

    const auto fa = map_from(kFixedA, 4, 4, PriorKind::intensity);
    const auto fb = map_from(kFixedB, 4, 4, PriorKind::lighting);
    CHECK(std::abs(similarity(fa, fb) - cosine_oracle(fa, fb)) <= 1e-9);

    CHECK(similarity(a, PriorMap(6, 7, PriorKind::lighting, 0.3f)) == 0.0);
    CHECK(similarity(PriorMap(6, 7, PriorKind::intensity, 0.3f), a) == 0.0);
    CHECK_THROWS_AS(similarity(a, PriorMap(7, 6, PriorKind::lighting)), ShapeError);
}

TEST_CASE("dynamic_fuse") {
    std::mt19937_64 rng(101);
    const auto intensity = oracle::random_prior(rng, 8, 9);
    SUBCASE("identical priors") {
        auto lighting = intensity;
        lighting.kind = PriorKind::lighting;
        const auto r = dynamic_fuse(intensity, lighting);
        CHECK(r.weight == 1.0);
        CHECK(r.fused.kind == PriorKind::fused);
        CHECK(r.fused.values == intensity.values);
    }
    SUBCASE("anti-correlated prior is rejected") {
        const auto lighting = transformed(intensity, -1.0f, 1.0f, PriorKind::lighting);
        const auto r = dynamic_fuse(intensity, lighting);
        CHECK(r.weight <= 1e-12);
        for (std::size_t i = 0; i < intensity.data().size(); ++i) {
            CHECK(std::abs(r.fused.data()[i] - intensity.data()[i]) <= 1e-9);
        }
    }
    SUBCASE("fixed 4 x 4 pair") {
        const auto fa = map_from(kFixedA, 4, 4, PriorKind::intensity);
        const auto fb = map_from(kFixedB, 4, 4, PriorKind::lighting);
        const auto r = dynamic_fuse(fa, fb);
        const double w = (cosine_oracle(fa, fb) + 1.0) / 2.0;
        CHECK(std::abs(r.weight - w) <= 1e-9);
        for (std::size_t i = 0; i < 16; ++i) {
            const double want = static_cast<float>(w * kFixedB[i] + (1 - w) * kFixedA[i]);
            CHECK(std::abs(r.fused.data()[i] - want) <= 1e-7);
        }
    }
    SUBCASE("constant map gives weight one half") {
        const auto r = dynamic_fuse(intensity, PriorMap(8, 9, PriorKind::lighting, 0.5f));
        CHECK(r.weight == 0.5);
    }
    SUBCASE("softmax mapping") {
        FusionOptions opt;
        opt.mapping = WeightMapping::softmax;
        opt.temperature = 0.5;
        const auto fa = map_from(kFixedA, 4, 4, PriorKind::intensity);
        const auto fb = map_from(kFixedB, 4, 4, PriorKind::lighting);
        const double s = cosine_oracle(fa, fb);
        const double want = std::exp(s / 0.5) / (std::exp(s / 0.5) + std::exp(-s / 0.5));
        CHECK(dynamic_fuse(fa, fb, opt).weight == doctest::Approx(want).epsilon(1e-12));
        opt.temperature = 0.0;
        CHECK_THROWS_AS(dynamic_fuse(fa, fb, opt), InvalidArgument);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(dynamic_fuse(intensity, PriorMap(8, 8, PriorKind::lighting)), ShapeError);
    }
}

TEST_CASE("fusion properties") {
    std::mt19937_64 rng(103);
    SUBCASE("fused map lies between its inputs") {
        int outside = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto a = oracle::random_prior(rng, 5, 6);
            const auto b = oracle::random_prior(rng, 5, 6);
            const auto r = dynamic_fuse(a, b);
            for (std::size_t k = 0; k < a.data().size(); ++k) {
                const float v = r.fused.data()[k];
                const float lo = std::min(a.data()[k], b.data()[k]);
                const float hi = std::max(a.data()[k], b.data()[k]);
                outside += v < lo || v > hi || v < 0.0f || v > 1.0f;
            }
            CHECK(r.weight >= 0.0);
            CHECK(r.weight <= 1.0);
        }
        CHECK(outside == 0);
    }
    SUBCASE("weight ignores positive affine rescaling") {
        const auto a = oracle::random_prior(rng, 7, 7);
        const auto b = oracle::random_prior(rng, 7, 7);
        const double w = dynamic_fuse(a, b).weight;
        const auto b2 = transformed(b, 0.5f, 0.25f, PriorKind::lighting);
        const auto a2 = transformed(a, 0.25f, 0.125f, PriorKind::intensity);
        CHECK(dynamic_fuse(a, b2).weight == doctest::Approx(w).epsilon(1e-6));
        CHECK(dynamic_fuse(a2, b).weight == doctest::Approx(w).epsilon(1e-6));
    }
}

TEST_CASE("fuse_sequence") {
    std::mt19937_64 rng(107);
    SUBCASE("identical priors give unit weights") {
        std::vector<PriorMap> in, li;
        for (int i = 0; i < 3; ++i) {
            in.push_back(oracle::random_prior(rng, 4, 5));
            li.push_back(in.back());
        }
        const auto r = fuse_sequence(in, li);
        CHECK(r.report.per_frame_weight == std::vector<double>{1.0, 1.0, 1.0});
        CHECK(r.report.clamp_count == 0);
    }
    SUBCASE("empty lists") {
        const auto r = fuse_sequence({}, {});
        CHECK(r.fused.empty());
        CHECK(r.report.per_frame_weight.empty());
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(fuse_sequence({PriorMap(2, 2, PriorKind::intensity)}, {}), InvalidArgument);
    }
    SUBCASE("matches per-frame fusion and respects permutation") {
        std::vector<PriorMap> in, li;
        for (int i = 0; i < 5; ++i) {
            in.push_back(oracle::random_prior(rng, 6, 6));
            li.push_back(oracle::random_prior(rng, 6, 6));
        }
        ThreadPool pool(3);
        const auto r = fuse_sequence(in, li, {}, &pool);
        for (std::size_t i = 0; i < in.size(); ++i) {
            const auto one = dynamic_fuse(in[i], li[i]);
            CHECK(r.report.per_frame_weight[i] == one.weight);
            CHECK(r.fused[i].values == one.fused.values);
        }
        const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
        std::vector<PriorMap> pin, pli;
        for (auto p : perm) {
            pin.push_back(in[p]);
            pli.push_back(li[p]);
        }
        const auto rp = fuse_sequence(pin, pli);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            CHECK(rp.report.per_frame_weight[i] == r.report.per_frame_weight[perm[i]]);
            CHECK(rp.fused[i].values == r.fused[perm[i]].values);
        }
    }
    SUBCASE("exponential smoothing") {
        std::vector<PriorMap> in, li;
        for (int i = 0; i < 4; ++i) {
            in.push_back(oracle::random_prior(rng, 6, 6));
            li.push_back(oracle::random_prior(rng, 6, 6));
        }
        const auto raw = fuse_sequence(in, li);
        FusionOptions opt;
        opt.smoothing = 0.75;
        const auto sm = fuse_sequence(in, li, opt);
        double prev = raw.report.per_frame_weight[0];
        CHECK(sm.report.per_frame_weight[0] == prev);
        for (std::size_t i = 1; i < 4; ++i) {
            prev = 0.75 * prev + 0.25 * raw.report.per_frame_weight[i];
            CHECK(sm.report.per_frame_weight[i] == doctest::Approx(prev).epsilon(1e-15));
        }
        opt.smoothing = 1.0;
        CHECK_THROWS_AS(fuse_sequence(in, li, opt), InvalidArgument);
    }
    SUBCASE("csv export") {
        FusionReport rep;
        rep.per_frame_weight = {0.5, 1.0};
        rep.per_frame_clamp = {0, 3};
        rep.clamp_count = 3;
        CHECK(rep.to_csv() == "frame_index,weight,clamp_count\n0,0.5,0\n1,1,3\n");
    }
}

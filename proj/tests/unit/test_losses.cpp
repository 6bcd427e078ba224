//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <random>

#include "loss_oracles.hpp"
#include "oracles.hpp"
#include "wavelut/lattice_io.hpp"
#include "wavelut/losses.hpp"

using namespace wavelut;
using namespace wavelut::oracle;

namespace {

EmbeddingVector emb(std::vector<float> v, EmbeddingSource s = EmbeddingSource::image) {
    return {"", std::move(v), s};
}

}  // namespace

TEST_CASE("clip_similarity") {
    CHECK(clip_similarity(emb({0.6f, 0.8f}), emb({0.6f, 0.8f})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(clip_similarity(emb({1, 0, 0}), emb({0, 5, 0})) == 0.0);
    CHECK(clip_similarity(emb({1, 2, 2}), emb({2, 0, 1})) == doctest::Approx(4.0 / (3.0 * std::sqrt(5.0))).epsilon(1e-12));
    CHECK(clip_similarity(emb({1, 2, 2}), emb({2, 0, 1})) == doctest::Approx(0.5963).epsilon(1e-4));
    CHECK_THROWS_AS(clip_similarity(emb({0, 0}), emb({1, 0})), NumericError);
    CHECK_THROWS_AS(clip_similarity(emb({1, 0}), emb({1, 0, 0})), ShapeError);
}

TEST_CASE("loss_parameter") {
    CHECK(loss_parameter(0.3, 0.3, 0.7, 0.7) == 0.0);
    CHECK(loss_parameter_raw(1, 0, 1, 0) == 2.0);
    CHECK(loss_parameter(1, 0, 1, 0) == 1.0);
    CHECK(loss_parameter(0.8, 0.6, 0.5, 0.7) == doctest::Approx(0.4).epsilon(1e-12));
    const auto p1 = emb({1, 0, 0}, EmbeddingSource::text);
    const auto p2 = emb({0, 1, 0}, EmbeddingSource::text);
    const auto r = emb({1, 1, 0});
    CHECK(varpi_from_embeddings(r, r, p1, p2) == 0.0);
    // ref sims (1/sqrt2, 1/sqrt2), enhanced (1, 0): |.29| + |.71| = 1.
    CHECK(varpi_from_embeddings(r, emb({1, 0, 0}), p1, p2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fourier_perceptual_loss") {
    std::mt19937_64 rng(139);
    const auto a = oracle::random_frame(rng, 8, 8);
    CHECK(fourier_perceptual_loss(a, a, 0.5) == 0.0);

    SUBCASE("DC shift with varpi 1") {
        const float delta = 0.125f;
        // Values on a 1/256 grid so the shifted frame is exact in f32.
        FrameTensor q = a;
        for (auto& v : q.values()) {
            v = std::round(v * 256.0f) / 256.0f;
        }
        FrameTensor b = q;
        for (auto& v : b.values()) {
            v += delta;
        }
        CHECK(std::abs(fourier_perceptual_loss(q, b, 1.0) - delta) <= 1e-9);
        CHECK(std::abs(fourier_oracle(q, b, 1.0) - delta) <= 1e-9);
    }
    SUBCASE("random pairs against the direct DFT") {
        for (int i = 0; i < 4; ++i) {
            const auto h = oracle::random_frame(rng, 8, 8);
            const auto r = oracle::random_frame(rng, 8, 8);
            CHECK(std::abs(fourier_perceptual_loss(h, r, 0.5) - fourier_oracle(h, r, 0.5)) <= 1e-5);
            CHECK(std::abs(fourier_perceptual_loss(h, r, 0.0) - fourier_oracle(h, r, 0.0)) <= 1e-5);
        }
        const auto h = oracle::random_frame(rng, 7, 5);
        const auto r = oracle::random_frame(rng, 7, 5);
        CHECK(std::abs(fourier_perceptual_loss(h, r, 0.3) - fourier_oracle(h, r, 0.3)) <= 1e-5);
    }
    SUBCASE("amplitude term ignores a shared circular shift") {
        const auto h = oracle::random_frame(rng, 8, 10);
        const auto r = oracle::random_frame(rng, 8, 10);
        FrameTensor hs(8, 10, 3), rs(8, 10, 3);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 10; ++x) {
                for (int c = 0; c < 3; ++c) {
                    hs.at((y + 3) % 8, (x + 7) % 10, c) = h.at(y, x, c);
                    rs.at((y + 3) % 8, (x + 7) % 10, c) = r.at(y, x, c);
                }
            }
        }
        CHECK(fourier_perceptual_loss(hs, rs, 1.0) == doctest::Approx(fourier_perceptual_loss(h, r, 1.0)).epsilon(1e-12));
    }
    SUBCASE("clip average") {
        const auto h2 = oracle::random_frame(rng, 8, 8);
        const double want = (fourier_perceptual_loss(a, h2, 0.4) + 0.0) / 2;
        CHECK(fourier_perceptual_loss(std::vector{a, a}, std::vector{h2, a}, 0.4) == doctest::Approx(want));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(fourier_perceptual_loss(a, FrameTensor(8, 7, 3), 0.5), ShapeError);
        CHECK_THROWS_AS(fourier_perceptual_loss(a, a, 1.5), InvalidArgument);
    }
}

TEST_CASE("content_loss") {
    std::mt19937_64 rng(149);
    const LossConstants k;
    SUBCASE("identical inputs sit on the epsilon floor") {
        const auto a = oracle::random_frame(rng, 16, 16);
        CHECK(content_loss(a, a, k) <= k.epsilon + 1e-9);
        CHECK(content_loss(a, a, k) >= k.epsilon * (1 - 1e-12));
    }
    SUBCASE("constant offset") {
        const auto a = oracle::random_frame(rng, 16, 16);
        FrameTensor b = a;
        for (auto& v : b.values()) {
            v = std::min(v, 0.85f);
        }
        FrameTensor c = b;
        for (auto& v : c.values()) {
            v += 0.1f;
        }
        LossConstants tiny = k;
        tiny.epsilon = 1e-12;
        tiny.vartheta = 0.0;
        CHECK(content_loss(b, c, tiny) == doctest::Approx(0.1).epsilon(1e-6));
        tiny.vartheta = 0.1;
        const double want = 0.1 + 0.1 * (1.0 - oracle::naive_ssim(b, c));
        CHECK(std::abs(content_loss(b, c, tiny) - want) <= 1e-6);
    }
    SUBCASE("8 x 8 pair against direct summation") {
        const auto h = oracle::random_frame(rng, 8, 8);
        const auto r = oracle::random_frame(rng, 8, 8);
        LossConstants no_ssim = k;
        no_ssim.vartheta = 0.0;
        double sum = 0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double d = static_cast<double>(h.values()[i]) - r.values()[i];
            sum += std::sqrt(d * d + 1e-12);
        }
        CHECK(std::abs(content_loss(h, r, no_ssim) - sum / static_cast<double>(h.size())) <= 1e-7);
        // The SSIM term needs an 11 x 11 window.
        CHECK_THROWS_AS(content_loss(h, r, k), InvalidArgument);
    }
    SUBCASE("16 x 16 pair with the SSIM term") {
        const auto h = oracle::random_frame(rng, 16, 16);
        const auto r = oracle::random_frame(rng, 16, 16);
        double sum = 0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double d = static_cast<double>(h.values()[i]) - r.values()[i];
            sum += std::sqrt(d * d + 1e-12);
        }
        const double want = sum / static_cast<double>(h.size()) + 0.1 * (1 - oracle::naive_ssim(h, r));
        CHECK(std::abs(content_loss(h, r, k) - want) <= 1e-7);
    }
}

TEST_CASE("smooth_loss") {
    CHECK(smooth_loss(constant_lattice(3, 0.4f), merged_only({0, 0, 0})) == 0.0);
    CHECK(smooth_loss(constant_lattice(3, 0.4f), merged_only({1, 0, 0})) == 1.0);
    SUBCASE("single perturbed entry") {
        const float delta = 0.25f;
        auto l = constant_lattice(2, 0.5f);
        auto v = l.entry({1, 0, 1, 0});
        v[1] += delta;
        l.set_entry({1, 0, 1, 0}, v);
        // n = 2: the entry has exactly one neighbour along each of the 4 axes.
        CHECK(smooth_loss(l, merged_only({})) == doctest::Approx(4 * delta * delta).epsilon(1e-12));
        CHECK(smooth_loss(l, merged_only({})) == doctest::Approx(smooth_oracle(l, {})).epsilon(1e-12));
    }
    SUBCASE("random lattices against the brute-force sum") {
        std::mt19937_64 rng(151);
        for (int n : {2, 3, 4}) {
            const auto l = oracle::random_lattice<4>(rng, n);
            const std::vector<double> w{0.3, -0.2, 0.9};
            CHECK(std::abs(smooth_loss(l, merged_only(w)) - smooth_oracle(l, w)) <= 1e-9);
        }
    }
    SUBCASE("quadratic in the lattice values") {
        std::mt19937_64 rng(157);
        const auto l = oracle::random_lattice<4>(rng, 4);
        Lattice4D half = l;
        for (auto& v : half.values()) {
            v *= 0.5f;
        }
        CHECK(smooth_loss(half, merged_only({})) == 0.25 * smooth_loss(l, merged_only({})));
        Lattice4D triple = l;
        for (auto& v : triple.values()) {
            v *= 3.0f;
        }
        CHECK(smooth_loss(triple, merged_only({})) == doctest::Approx(9 * smooth_loss(l, merged_only({}))).epsilon(1e-6));
    }
}

TEST_CASE("monotone_loss") {
    CHECK(monotone_loss(make_identity_lattice4d(5)) == 0.0);
    SUBCASE("single inverted pair") {
        const float delta = 0.125f;
        auto l = make_identity_lattice4d(3);
        auto v = l.entry({2, 0, 0, 0});
        v[0] = 0.5f - delta;
        l.set_entry({2, 0, 0, 0}, v);
        CHECK(monotone_loss(l) == doctest::Approx(delta).epsilon(1e-12));
    }
    SUBCASE("random lattices against the brute-force sum") {
        std::mt19937_64 rng(163);
        for (int n : {2, 3, 4}) {
            const auto l = oracle::random_lattice<4>(rng, n);
            CHECK(std::abs(monotone_loss(l) - monotone_oracle(l)) <= 1e-9);
        }
    }
    SUBCASE("zero exactly when every forward difference is non-negative") {
        std::mt19937_64 rng(167);
        for (int trial = 0; trial < 40; ++trial) {
            const int n = 2 + trial % 3;
            // Sums of non-negative per-axis steps are monotone; a random
            // kick sometimes breaks that.
            Lattice4D l(n);
            std::uniform_real_distribution<float> u(0.0f, 0.1f);
            std::array<std::vector<float>, 4> steps;
            for (auto& s : steps) {
                s.resize(static_cast<std::size_t>(n));
                for (auto& x : s) {
                    x = u(rng);
                }
            }
            for (int s = 0; s < n; ++s)
                for (int z = 0; z < n; ++z)
                    for (int y = 0; y < n; ++y)
                        for (int x = 0; x < n; ++x) {
                            float acc = 0;
                            const int idx[4] = {x, y, z, s};
                            for (int d = 0; d < 4; ++d)
                                for (int k = 0; k <= idx[d]; ++k) acc += steps[d][static_cast<std::size_t>(k)];
                            l.set_entry({x, y, z, s}, {acc, acc, acc});
                        }
            if (trial % 2 == 1) {
                auto v = l.entry({0, n - 1, 0, 0});
                v[2] += 0.5f;
                l.set_entry({0, n - 1, 0, 0}, v);
            }
            bool all_non_decreasing = true;
            brute_pairs(l, [&](double a, double b) { all_non_decreasing = all_non_decreasing && b >= a; });
            CHECK((monotone_loss(l) == 0.0) == all_non_decreasing);
        }
    }
}

TEST_CASE("total_loss") {
    CHECK(total_loss(0, 0, 0, 0).total == 0.0);
    CHECK(total_loss(1, 0, 0, 0).total == 1.0);
    const auto b = total_loss(1, 0.5, 2, 0.1);
    CHECK(b.total == doctest::Approx(2.5002).epsilon(1e-12));
    CHECK(b.constants.beta_s == 1e-4);
    CHECK(b.constants.beta_m == 10.0);
    CHECK(b.constants.vartheta == 0.1);
    // Linear in each component with the documented coefficients.
    const auto base = total_loss(0.3, 0.2, 5, 0.05);
    CHECK(total_loss(1.3, 0.2, 5, 0.05).total - base.total == doctest::Approx(1.0));
    CHECK(total_loss(0.3, 1.2, 5, 0.05).total - base.total == doctest::Approx(1.0));
    CHECK(total_loss(0.3, 0.2, 6, 0.05).total - base.total == doctest::Approx(1e-4));
    CHECK(total_loss(0.3, 0.2, 5, 1.05).total - base.total == doctest::Approx(10.0));
    CHECK_THROWS_AS(total_loss(std::nan(""), 0, 0, 0), NumericError);
    CHECK_THROWS_AS(total_loss(0, 0, INFINITY, 0), NumericError);
}

TEST_CASE("embedding files") {
    const auto dir = std::filesystem::temp_directory_path() / "wavelut_test_losses";
    std::filesystem::create_directories(dir);
    std::vector<EmbeddingVector> v{{"a", {1.0f, -2.0f, 0.5f}, EmbeddingSource::image},
                                   {"prompt", {0.25f, 0.0f, 3.0f}, EmbeddingSource::text}};
    save_embeddings(v, dir / "e.bin");
    const auto back = load_embeddings(dir / "e.bin");
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "a");
    CHECK(back[0].values == v[0].values);
    CHECK(back[1].source == EmbeddingSource::text);
    CHECK(find_embedding(back, "prompt").values == v[1].values);
    CHECK_THROWS_AS(find_embedding(back, "missing"), InvalidArgument);

    auto bytes = read_file_bytes(dir / "e.bin");
    bytes.pop_back();
    write_file_bytes(dir / "trunc.bin", bytes);
    CHECK_THROWS_AS(load_embeddings(dir / "trunc.bin"), FormatError);

    if (const char* data = std::getenv("WAVELUT_DATA_DIR")) {
        const auto path = std::filesystem::path(data) / "embeddings.bin";
        if (std::filesystem::exists(path)) {
            const auto shipped = load_embeddings(path);
            const auto& t1 = find_embedding(shipped, "high light image");
            const auto& t2 = find_embedding(shipped, "clean image");
            CHECK(t1.source == EmbeddingSource::text);
            CHECK(t2.values.size() == t1.values.size());
            const double w = varpi_from_embeddings(find_embedding(shipped, "reference"),
                                                   find_embedding(shipped, "enhanced"), t1, t2);
            CHECK(w >= 0.0);
            CHECK(w <= 1.0);
        }
    }
}

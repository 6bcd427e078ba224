//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wavelut/interpolate.hpp"
#include "wavelut/lattice.hpp"
#include "wavelut/thread_pool.hpp"

using namespace wavelut;

namespace {

double max_abs_diff(const FrameTensor& a, const FrameTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a.values()[i]) - b.values()[i]));
    }
    return m;
}

}  // namespace

TEST_CASE("identity lattice4d maps rgb to itself") {
    SUBCASE("n = 2 center") {
        const auto lut = make_identity_lattice4d(2);
        for (float e : {0.0f, 0.3f, 1.0f}) {
            const auto out = quadrilinear_sample(lut, 0.5f, 0.5f, 0.5f, e);
            CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-7));
            CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-7));
            CHECK(out[2] == doctest::Approx(0.5).epsilon(1e-7));
        }
    }
    SUBCASE("n = 17 grid point") {
        const auto lut = make_identity_lattice4d(17);
        const auto out = quadrilinear_sample(lut, 0.25f, 0.5f, 0.75f, 0.0f);
        CHECK(out[0] == 0.25f);
        CHECK(out[1] == 0.5f);
        CHECK(out[2] == 0.75f);
    }
    SUBCASE("n = 3 random queries") {
        const auto lut = make_identity_lattice4d(3);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<float> u(0.0f, 1.0f);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const float r = u(rng), g = u(rng), b = u(rng), e = u(rng);
            const auto out = quadrilinear_sample(lut, r, g, b, e);
            worst = std::max({worst, static_cast<double>(std::abs(out[0] - r)), static_cast<double>(std::abs(out[1] - g)), static_cast<double>(std::abs(out[2] - b))});
        }
        CHECK(worst <= 1e-6);
    }
    SUBCASE("invalid size") {
        CHECK_THROWS_AS(make_identity_lattice4d(1), InvalidArgument);
        CHECK_THROWS_AS(make_identity_lattice4d(0), InvalidArgument);
    }
}

TEST_CASE("coordinate axis validation") {
    CHECK_THROWS_AS(CoordinateAxis({0.0f}), InvalidArgument);
    CHECK_THROWS_AS(CoordinateAxis({0.1f, 1.0f}), InvalidArgument);
    CHECK_THROWS_AS(CoordinateAxis({0.0f, 0.9f}), InvalidArgument);
    CHECK_THROWS_AS(CoordinateAxis({0.0f, 0.5f, 0.5f, 1.0f}), InvalidArgument);
    CHECK(CoordinateAxis::uniform(17).is_uniform());
    CHECK_FALSE(CoordinateAxis({0.0f, 0.1f, 0.4f, 1.0f}).is_uniform());
}

TEST_CASE("locate_index") {
    SUBCASE("uniform midpoint") {
        const auto loc = locate_index(CoordinateAxis::uniform(17), 0.5f);
        CHECK(loc.index == 8);
        CHECK(loc.offset == 0.0f);
    }
    SUBCASE("upper boundary resolves to last cell") {
        for (int n : {2, 3, 17, 33}) {
            const auto loc = locate_index(CoordinateAxis::uniform(n), 1.0f);
            CHECK(loc.index == n - 2);
            CHECK(loc.offset == 1.0f);
        }
        const auto loc = locate_index(CoordinateAxis({0.0f, 0.1f, 0.4f, 1.0f}), 1.0f);
        CHECK(loc.index == 2);
        CHECK(loc.offset == 1.0f);
    }
    SUBCASE("non-uniform axis") {
        const CoordinateAxis axis({0.0f, 0.1f, 0.4f, 1.0f});
        // Linear-scan oracle: the cell whose lower coordinate is the largest <= 0.25.
        const int expect_index = oracle::scan_cell(axis.coords(), 0.25);
        const double expect_offset = oracle::cell_offset(axis.coords(), expect_index, 0.25);
        REQUIRE(expect_index == 1);
        REQUIRE(expect_offset == doctest::Approx(0.5).epsilon(1e-6));
        const auto loc = locate_index(axis, 0.25f);
        CHECK(loc.index == expect_index);
        CHECK(loc.offset == doctest::Approx(expect_offset).epsilon(1e-6));
    }
    SUBCASE("interior tie resolves to the cell above with offset 0") {
        const CoordinateAxis axis({0.0f, 0.1f, 0.4f, 1.0f});
        const auto loc = locate_index(axis, 0.4f);
        CHECK(loc.index == 2);
        CHECK(loc.offset == 0.0f);
    }
    SUBCASE("out of range values are clamped and flagged") {
        const auto axis = CoordinateAxis::uniform(5);
        bool clamped = false;
        auto loc = locate_index(axis, -0.25f, &clamped);
        CHECK(clamped);
        CHECK(loc.index == 0);
        CHECK(loc.offset == 0.0f);
        loc = locate_index(axis, 1.5f, &clamped);
        CHECK(clamped);
        CHECK(loc.index == 3);
        CHECK(loc.offset == 1.0f);
        loc = locate_index(axis, std::nanf(""), &clamped);
        CHECK(clamped);
        CHECK(loc.index == 0);
        loc = locate_index(axis, 0.3f, &clamped);
        CHECK_FALSE(clamped);
    }
    SUBCASE("agrees with a linear scan on random axes") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<float> u(0.0f, 1.0f);
        for (int n : {2, 3, 5, 17, 33}) {
            for (const auto& axis : {CoordinateAxis::uniform(n), oracle::random_axis(rng, n)}) {
                int mismatches = 0;
                double worst = 0.0;
                for (int i = 0; i < 10000; ++i) {
                    // Mix in exact grid coordinates to exercise ties.
                    const float v = (i % 10 == 0) ? axis[static_cast<int>(rng() % static_cast<unsigned>(n))] : u(rng);
                    const auto loc = locate_index(axis, v);
                    const int k = oracle::scan_cell(axis.coords(), v);
                    mismatches += loc.index != k;
                    worst = std::max(worst, std::abs(loc.offset - oracle::cell_offset(axis.coords(), k, v)));
                }
                CHECK(mismatches == 0);
                CHECK(worst <= 1e-6);
            }
        }
    }
}

TEST_CASE("trilinear_apply") {
    std::mt19937_64 rng(3);
    const auto frame = oracle::random_frame(rng, 9, 13);
    SUBCASE("identity") {
        CHECK(max_abs_diff(trilinear_apply(make_identity_lattice3d(17), frame), frame) <= 1e-6);
    }
    SUBCASE("constant") {
        Lattice3D lut(5);
        for (auto& v : lut.values()) {
            v = 0.3f;
        }
        const auto out = trilinear_apply(lut, frame);
        for (float v : out.values()) {
            CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
        }
    }
    SUBCASE("matches the 8-corner oracle on a random lattice") {
        for (bool random_axes : {false, true}) {
            const auto lut = oracle::random_lattice<3>(rng, 5, random_axes);
            const auto out = trilinear_apply(lut, frame);
            double worst = 0.0;
            for (int y = 0; y < frame.height(); ++y) {
                for (int x = 0; x < frame.width(); ++x) {
                    const auto ref = oracle::trilinear(lut, frame.at(y, x, 0), frame.at(y, x, 1), frame.at(y, x, 2));
                    for (int c = 0; c < 3; ++c) {
                        worst = std::max(worst, std::abs(out.at(y, x, c) - ref[c]));
                    }
                }
            }
            CHECK(worst <= 1e-6);
        }
    }
    SUBCASE("out-of-range inputs are clamped and counted") {
        FrameTensor f(1, 2, 3);
        f.at(0, 0, 0) = -0.5f;
        f.at(0, 0, 1) = 0.5f;
        f.at(0, 0, 2) = 2.0f;
        f.at(0, 1, 0) = 0.25f;
        ClampStats stats;
        const auto out = trilinear_apply(make_identity_lattice3d(5), f, &stats);
        CHECK(stats.clamped_values == 2);
        CHECK(stats.total_values == 6);
        CHECK(out.at(0, 0, 0) == 0.0f);
        CHECK(out.at(0, 0, 2) == 1.0f);
        for (float v : out.values()) {
            CHECK(v >= 0.0f);
            CHECK(v <= 1.0f);
        }
    }
    SUBCASE("wrong channel count") {
        CHECK_THROWS_AS(trilinear_apply(make_identity_lattice3d(3), FrameTensor(2, 2, 1)), ShapeError);
    }
}

TEST_CASE("quadrilinear_apply") {
    std::mt19937_64 rng(5);
    const auto frame = oracle::random_frame(rng, 8, 12);
    const auto prior = oracle::random_prior(rng, 8, 12);

    SUBCASE("identity lattice is the identity regardless of prior") {
        const auto lut = make_identity_lattice4d(17);
        CHECK(max_abs_diff(quadrilinear_apply(lut, frame, prior), frame) <= 1e-6);
        PriorMap zero(8, 12, PriorKind::fused, 0.0f);
        CHECK(max_abs_diff(quadrilinear_apply(lut, frame, zero), frame) <= 1e-6);
    }
    SUBCASE("grid points return stored values bit for bit") {
        for (bool random_axes : {false, true}) {
            const int n = 5;
            const auto lut = oracle::random_lattice<4>(rng, n, random_axes);
            int mismatches = 0;
            for (int s = 0; s < n; ++s) {
                for (int z = 0; z < n; ++z) {
                    for (int y = 0; y < n; ++y) {
                        for (int x = 0; x < n; ++x) {
                            const auto& a = lut.axes();
                            const auto out = quadrilinear_sample(lut, a[0][x], a[1][y], a[2][z], a[3][s]);
                            mismatches += out != lut.entry({x, y, z, s});
                        }
                    }
                }
            }
            CHECK(mismatches == 0);
        }
    }
    SUBCASE("matches the literal 16-term expansion") {
        for (bool random_axes : {false, true}) {
            const auto lut = oracle::random_lattice<4>(rng, 4, random_axes);
            const auto out = quadrilinear_apply(lut, frame, prior);
            double worst = 0.0;
            for (int y = 0; y < frame.height(); ++y) {
                for (int x = 0; x < frame.width(); ++x) {
                    const auto ref = oracle::quadrilinear(lut, frame.at(y, x, 0), frame.at(y, x, 1),
                                                          frame.at(y, x, 2), prior.at(y, x));
                    for (int c = 0; c < 3; ++c) {
                        worst = std::max(worst, std::abs(out.at(y, x, c) - ref[c]));
                    }
                }
            }
            CHECK(worst <= 1e-6);
        }
    }
    SUBCASE("weights form a partition of unity") {
        // A lattice of all ones returns the sum of the blend weights.
        Lattice4D ones(5);
        for (auto& v : ones.values()) {
            v = 1.0f;
        }
        const auto out = quadrilinear_apply(ones, frame, prior);
        for (float v : out.values()) {
            CHECK(std::abs(v - 1.0f) <= 1e-6f);
        }
        // In double, the products of the located offsets sum to 1 to 1e-12.
        std::uniform_real_distribution<float> u(0.0f, 1.0f);
        const auto axis = oracle::random_axis(rng, 7);
        for (int i = 0; i < 1000; ++i) {
            double o[4];
            for (double& od : o) {
                od = locate_index(axis, u(rng)).offset;
                REQUIRE(od >= 0.0);
                REQUIRE(od <= 1.0);
            }
            double sum = 0.0;
            for (int corner = 0; corner < 16; ++corner) {
                double w = 1.0;
                for (int d = 0; d < 4; ++d) {
                    w *= ((corner >> d) & 1) ? o[d] : 1.0 - o[d];
                }
                sum += w;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    SUBCASE("monotone lattice gives monotone output along red") {
        const int n = 5;
        auto lut = oracle::random_lattice<4>(rng, n);
        // Make the red channel non-decreasing along the red index.
        for (int s = 0; s < n; ++s) {
            for (int z = 0; z < n; ++z) {
                for (int y = 0; y < n; ++y) {
                    float running = 0.0f;
                    for (int x = 0; x < n; ++x) {
                        auto v = lut.entry({x, y, z, s});
                        running = std::max(running, v[0]);
                        v[0] = running;
                        lut.set_entry({x, y, z, s}, v);
                    }
                }
            }
        }
        std::uniform_real_distribution<float> u(0.0f, 1.0f);
        int violations = 0;
        for (int i = 0; i < 500; ++i) {
            const float g = u(rng), b = u(rng), e = u(rng);
            float prev = -1.0f;
            for (int step = 0; step <= 64; ++step) {
                const float r = static_cast<float>(step) / 64.0f;
                const float out = quadrilinear_sample(lut, r, g, b, e)[0];
                violations += out < prev - 1e-6f;
                prev = out;
            }
        }
        CHECK(violations == 0);
    }
    SUBCASE("shape mismatch") {
        const auto lut = make_identity_lattice4d(3);
        CHECK_THROWS_AS(quadrilinear_apply(lut, frame, PriorMap(8, 11, PriorKind::fused)), ShapeError);
        CHECK_THROWS_AS(quadrilinear_apply(lut, FrameTensor(8, 12, 1), prior), ShapeError);
    }
    SUBCASE("row-parallel apply is bitwise identical") {
        const auto lut = oracle::random_lattice<4>(rng, 5);
        const auto serial = quadrilinear_apply(lut, frame, prior);
        for (int threads : {1, 2, 3, 8}) {
            ThreadPool pool(threads);
            CHECK(quadrilinear_apply(lut, frame, prior, pool) == serial);
        }
    }
}

TEST_CASE("fuse_basis_luts") {
    std::mt19937_64 rng(9);
    const auto b0 = oracle::random_lattice<4>(rng, 3);
    const auto b1 = oracle::random_lattice<4>(rng, 3);
    const auto b2 = oracle::random_lattice<4>(rng, 3);
    const std::vector<Lattice4D> bases{b0, b1, b2};

    SUBCASE("one-hot weights select a basis exactly") {
        CHECK(fuse_basis_luts(bases, merged_only({0.0, 1.0, 0.0})) == b1);
    }
    SUBCASE("identical bases with weights summing to one") {
        const std::vector<Lattice4D> same{b0, b0, b0};
        CHECK(fuse_basis_luts(same, merged_only({0.2, 0.3, 0.5})) == b0);
    }
    SUBCASE("matches an element-wise oracle") {
        const std::vector<Lattice4D> two{b0, b1};
        const auto fused = fuse_basis_luts(two, merged_only({0.4, 0.6}));
        double worst = 0.0;
        for (std::size_t i = 0; i < fused.value_count(); ++i) {
            const double expect = static_cast<float>(0.4 * b0.values()[i] + 0.6 * b1.values()[i]);
            worst = std::max(worst, std::abs(fused.values()[i] - expect));
        }
        CHECK(worst <= 1e-9);
    }
    SUBCASE("linear in the weights") {
        // Dyadic values and weights make every intermediate exact.
        auto dyadic = [&](std::uint64_t seed) {
            std::mt19937_64 r(seed);
            Lattice4D l(3);
            for (auto& v : l.values()) {
                v = static_cast<float>(r() % 257) / 256.0f;
            }
            return l;
        };
        const std::vector<Lattice4D> d{dyadic(1), dyadic(2), dyadic(3)};
        const auto f1 = fuse_basis_luts(d, merged_only({0.25, 0.5, 0.125}));
        const auto f2 = fuse_basis_luts(d, merged_only({0.5, 0.125, 0.25}));
        const auto f12 = fuse_basis_luts(d, merged_only({0.75, 0.625, 0.375}));
        double worst = 0.0;
        for (std::size_t i = 0; i < f12.value_count(); ++i) {
            worst = std::max(worst, std::abs(static_cast<double>(f12.values()[i]) - f1.values()[i] - f2.values()[i]));
        }
        CHECK(worst <= 1e-9);

        // Arbitrary values: equal up to one float rounding per term.
        const auto r1 = fuse_basis_luts(bases, merged_only({0.31, 0.17, 0.52}));
        const auto r2 = fuse_basis_luts(bases, merged_only({0.12, 0.66, 0.22}));
        const auto r12 = fuse_basis_luts(bases, merged_only({0.43, 0.83, 0.74}));
        worst = 0.0;
        for (std::size_t i = 0; i < r12.value_count(); ++i) {
            worst = std::max(worst, std::abs(static_cast<double>(r12.values()[i]) - r1.values()[i] - r2.values()[i]));
        }
        CHECK(worst <= 1e-6);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(fuse_basis_luts(std::vector<Lattice4D>{}, merged_only({})), InvalidArgument);
        const std::vector<Lattice4D> mixed{b0, make_identity_lattice4d(4)};
        CHECK_THROWS_AS(fuse_basis_luts(mixed, merged_only({0.5, 0.5})), ShapeError);
        CHECK_THROWS_AS(fuse_basis_luts(bases, merged_only({0.5, 0.5})), ShapeError);
    }
}

TEST_CASE("merge_weights") {
    const auto mean = merge_weights({1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}, MergeMode::mean);
    CHECK(mean.merged == std::vector<double>{0.5, 0.5, 0.5});
    const auto sum = merge_weights({1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}, MergeMode::sum);
    CHECK(sum.merged == std::vector<double>{1.0, 1.0, 1.0});
    CHECK_THROWS_AS(merge_weights({1.0}, {1.0, 2.0}, MergeMode::mean), ShapeError);
    CHECK(parse_merge_mode("sum") == MergeMode::sum);
    CHECK_THROWS_AS(parse_merge_mode("max"), InvalidArgument);
}

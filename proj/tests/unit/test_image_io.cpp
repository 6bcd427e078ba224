//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "tempdir.hpp"
#include "wavelut/error.hpp"
#include "wavelut/image_io.hpp"

using namespace wavelut;
using wavelut::testing::TempDir;

namespace {

FrameTensor random_frame(std::mt19937_64& rng, int h, int w) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    FrameTensor f(h, w, 3);
    for (float& v : f.values()) {
        v = u(rng);
    }
    return f;
}

double max_abs_diff(const FrameTensor& a, const FrameTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a.values()[i]) - b.values()[i]));
    }
    return m;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream os(p, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Writes a PNG directly through libpng so decoding is checked against a
// file the library under test did not produce.
void write_png_raw(const std::filesystem::path& p, int w, int h, int color_type, int depth,
                   const std::vector<std::uint8_t>& rows, const std::vector<png_color>& palette = {}) {
    FILE* fp = std::fopen(p.c_str(), "wb");
    REQUIRE(fp);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (!palette.empty()) {
        png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
    }
    png_write_info(png, info);
    const std::size_t stride = rows.size() / static_cast<std::size_t>(h);
    for (int y = 0; y < h; ++y) {
        png_write_row(png, rows.data() + stride * static_cast<std::size_t>(y));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

TEST_CASE("image formats") {
    CHECK(parse_image_format("png") == ImageFormat::png8);
    CHECK(parse_image_format("png16") == ImageFormat::png16);
    CHECK(parse_image_format("ppm") == ImageFormat::ppm8);
    CHECK(parse_image_format("ppm16") == ImageFormat::ppm16);
    CHECK_THROWS_AS(parse_image_format("jpeg"), InvalidArgument);
    CHECK(bit_depth(ImageFormat::png16) == 16);
    CHECK(bit_depth(ImageFormat::ppm8) == 8);
    CHECK(extension(ImageFormat::ppm16) == ".ppm");
    for (auto f : {ImageFormat::png8, ImageFormat::png16, ImageFormat::ppm8, ImageFormat::ppm16}) {
        CHECK(parse_image_format(to_string(f)) == f);
    }
}

TEST_CASE("8-bit roundtrip stays within half a quantization step") {
    std::mt19937_64 rng(3);
    TempDir dir;
    for (auto fmt : {ImageFormat::png8, ImageFormat::ppm8}) {
        ClipSequence clip;
        for (int i = 0; i < 3; ++i) {
            clip.frames.push_back(random_frame(rng, 17, 23));
        }
        const auto sub = dir / to_string(fmt);
        const auto paths = save_frames(clip, sub, fmt);
        REQUIRE(paths.size() == 3);
        CHECK(paths[1].filename() == "frame_000001" + extension(fmt));
        const ClipSequence back = load_frames(sub.string());
        REQUIRE(back.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(max_abs_diff(clip.frames[i], back.frames[i]) <= 1.0 / 510.0 + 1e-7);
        }
    }
}

TEST_CASE("16-bit ramp roundtrip") {
    TempDir dir;
    const int w = 4096;
    FrameTensor ramp(2, w, 3);
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                ramp.at(y, x, c) = static_cast<float>((x * 3 + c + y * 7) % w) / static_cast<float>(w - 1);
            }
        }
    }
    for (auto fmt : {ImageFormat::png16, ImageFormat::ppm16}) {
        const auto path = dir / ("ramp" + extension(fmt));
        save_image(ramp, path, fmt);
        const FrameTensor back = load_image(path);
        // 1/131070 is half a 16-bit step; float storage adds at most one ulp near 1.
        CHECK(max_abs_diff(ramp, back) <= 1.0 / 131070.0 + 6e-8);
    }
}

TEST_CASE("quantization rounds to nearest and clamps") {
    TempDir dir;
    FrameTensor f(1, 4, 3);
    const float vals[4] = {-0.5f, 0.45f / 255.0f, 1.55f / 255.0f, 2.0f};
    for (int x = 0; x < 4; ++x) {
        for (int c = 0; c < 3; ++c) {
            f.at(0, x, c) = vals[x];
        }
    }
    const auto path = dir / "q.ppm";
    save_image(f, path, ImageFormat::ppm8);
    std::ifstream is(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    REQUIRE(bytes.size() >= 12);
    const auto* px = reinterpret_cast<const unsigned char*>(bytes.data() + bytes.size() - 12);
    CHECK(px[0] == 0);
    CHECK(px[3] == 0);
    CHECK(px[6] == 2);
    CHECK(px[9] == 255);
}

TEST_CASE("hand-written PPM decodes by maxval") {
    TempDir dir;
    const auto p8 = dir / "a.ppm";
    std::string s = "P6\n# comment\n2 1\n255\n";
    s += std::string("\x00\x80\xff\x10\x20\x30", 6);
    write_bytes(p8, s);
    const FrameTensor a = load_image(p8);
    REQUIRE(a.height() == 1);
    REQUIRE(a.width() == 2);
    CHECK(a.at(0, 0, 1) == doctest::Approx(128.0 / 255.0).epsilon(1e-7));
    CHECK(a.at(0, 0, 2) == 1.0f);
    CHECK(a.at(0, 1, 0) == doctest::Approx(16.0 / 255.0).epsilon(1e-7));

    const auto p16 = dir / "b.ppm";
    std::string t = "P6 1 1 1000\n";
    t += std::string("\x01\xf4\x00\x00\x03\xe8", 6);
    write_bytes(p16, t);
    const FrameTensor b = load_image(p16);
    CHECK(b.at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(b.at(0, 0, 1) == 0.0f);
    CHECK(b.at(0, 0, 2) == 1.0f);
}

TEST_CASE("PNG colour types decode to RGB") {
    TempDir dir;
    SUBCASE("grey") {
        write_png_raw(dir / "g.png", 2, 1, PNG_COLOR_TYPE_GRAY, 8, {0, 51});
        const FrameTensor f = load_image(dir / "g.png");
        CHECK(f.at(0, 1, 0) == doctest::Approx(0.2).epsilon(1e-7));
        CHECK(f.at(0, 1, 2) == f.at(0, 1, 0));
    }
    SUBCASE("rgba drops alpha") {
        write_png_raw(dir / "a.png", 1, 1, PNG_COLOR_TYPE_RGBA, 8, {255, 0, 102, 7});
        const FrameTensor f = load_image(dir / "a.png");
        CHECK(f.channels() == 3);
        CHECK(f.at(0, 0, 0) == 1.0f);
        CHECK(f.at(0, 0, 2) == doctest::Approx(0.4).epsilon(1e-7));
    }
    SUBCASE("palette") {
        write_png_raw(dir / "p.png", 2, 1, PNG_COLOR_TYPE_PALETTE, 8, {1, 0}, {{0, 0, 0}, {255, 51, 0}});
        const FrameTensor f = load_image(dir / "p.png");
        CHECK(f.at(0, 0, 0) == 1.0f);
        CHECK(f.at(0, 0, 1) == doctest::Approx(0.2).epsilon(1e-7));
        CHECK(f.at(0, 1, 0) == 0.0f);
    }
    SUBCASE("16-bit grey is big-endian") {
        write_png_raw(dir / "g16.png", 1, 1, PNG_COLOR_TYPE_GRAY, 16, {0x80, 0x00});
        const FrameTensor f = load_image(dir / "g16.png");
        CHECK(f.at(0, 0, 0) == doctest::Approx(32768.0 / 65535.0).epsilon(1e-7));
    }
}

TEST_CASE("sequence listing") {
    std::mt19937_64 rng(5);
    TempDir dir;
    SUBCASE("empty directory") {
        CHECK_THROWS_AS(load_frames(dir.path().string()), EmptySequenceError);
    }
    SUBCASE("lexicographic order and glob") {
        const FrameTensor a = random_frame(rng, 4, 4);
        const FrameTensor b = random_frame(rng, 4, 4);
        save_image(a, dir / "x_10.png", ImageFormat::png16);
        save_image(b, dir / "x_02.png", ImageFormat::png16);
        save_image(a, dir / "y_01.ppm", ImageFormat::ppm8);
        write_bytes(dir / "notes.txt", "hello");
        const auto all = list_frames(dir.path().string());
        REQUIRE(all.size() == 3);
        CHECK(all[0].filename() == "x_02.png");
        CHECK(all[2].filename() == "y_01.ppm");
        const ClipSequence clip = load_frames((dir / "x_*.png").string(), 24.0);
        REQUIRE(clip.size() == 2);
        CHECK(clip.fps == 24.0);
        CHECK(max_abs_diff(clip.frames[0], b) <= 1.0 / 131070.0 + 6e-8);
        CHECK_THROWS_AS(load_frames((dir / "z_*.png").string()), EmptySequenceError);
    }
    SUBCASE("mixed sizes") {
        save_image(random_frame(rng, 4, 4), dir / "a.png", ImageFormat::png8);
        save_image(random_frame(rng, 4, 5), dir / "b.png", ImageFormat::png8);
        CHECK_THROWS_AS(load_frames(dir.path().string()), FormatError);
    }
    SUBCASE("unreadable file names the path") {
        write_bytes(dir / "bad.png", "not a png at all");
        try {
            load_frames(dir.path().string());
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("bad.png") != std::string::npos);
        }
        CHECK_THROWS_AS(load_image(dir / "missing.png"), IoError);
        CHECK_THROWS_AS(list_frames((dir / "nope").string()), IoError);
    }
}

TEST_CASE("clip validation") {
    ClipSequence clip;
    clip.frames.emplace_back(4, 4, 3);
    clip.frames.emplace_back(4, 3, 3);
    CHECK_THROWS_AS(clip.validate(), FormatError);
    clip.frames.pop_back();
    clip.frames.emplace_back(4, 4, 1);
    CHECK_THROWS_AS(clip.validate(), FormatError);
}

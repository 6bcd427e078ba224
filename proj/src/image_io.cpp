//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/image_io.hpp"

#include <fnmatch.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace wavelut {

ImageFormat parse_image_format(const std::string& text) {
    if (text == "png" || text == "png8") {
        return ImageFormat::png8;
    }
    if (text == "png16") {
        return ImageFormat::png16;
    }
    if (text == "ppm" || text == "ppm8") {
        return ImageFormat::ppm8;
    }
    if (text == "ppm16") {
        return ImageFormat::ppm16;
    }
    throw InvalidArgument("unknown image format '" + text + "' (expected png8, png16, ppm8 or ppm16)");
}

std::string to_string(ImageFormat format) {
    switch (format) {
        case ImageFormat::png8:
            return "png8";
        case ImageFormat::png16:
            return "png16";
        case ImageFormat::ppm8:
            return "ppm8";
        case ImageFormat::ppm16:
            return "ppm16";
    }
    return "png8";
}

int bit_depth(ImageFormat format) noexcept {
    return format == ImageFormat::png16 || format == ImageFormat::ppm16 ? 16 : 8;
}

std::string extension(ImageFormat format) {
    return format == ImageFormat::png8 || format == ImageFormat::png16 ? ".png" : ".ppm";
}

void ClipSequence::validate() const {
    for (const auto& f : frames) {
        if (f.channels() != 3) {
            throw FormatError("clip: frames must have 3 channels");
        }
        if (f.height() != frames.front().height() || f.width() != frames.front().width()) {
            throw FormatError("clip: frames differ in size");
        }
    }
}

namespace {

std::uint32_t quantize(float v, std::uint32_t maxval) {
    double x = static_cast<double>(v);
    x = std::isnan(x) ? 0.0 : std::clamp(x, 0.0, 1.0);
    return static_cast<std::uint32_t>(std::nearbyint(x * maxval));
}

std::string lower_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// ----------------------------------------------------------------------------
// PNG

struct PngError {
    char message[256] = {};
};

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* err = static_cast<PngError*>(png_get_error_ptr(png));
    std::snprintf(err->message, sizeof err->message, "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    }
    return f;
}

FrameTensor load_png(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");
    PngError err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (png == nullptr) {
        throw IoError("png: out of memory reading '" + path.string() + "'");
    }
    png_infop info = png_create_info_struct(png);
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0, height = 0;
    int depth = 0;
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": invalid PNG: " + err.message);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
        depth = 8;
    }
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
        depth = 8;
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    pixels.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = pixels.data() + y * rowbytes;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (rowbytes != static_cast<std::size_t>(width) * 3 * (depth == 16 ? 2 : 1)) {
        throw FormatError(path.string() + ": unsupported PNG layout");
    }
    FrameTensor f(static_cast<int>(height), static_cast<int>(width), 3);
    auto out = f.values();
    if (depth == 16) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const unsigned v = (static_cast<unsigned>(pixels[2 * i]) << 8) | pixels[2 * i + 1];
            out[i] = static_cast<float>(v / 65535.0);
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<float>(pixels[i] / 255.0);
        }
    }
    return f;
}

void save_png(const FrameTensor& frame, const std::filesystem::path& path, int depth) {
    const std::uint32_t maxval = depth == 16 ? 65535u : 255u;
    const std::size_t bytes = depth == 16 ? 2 : 1;
    const std::size_t rowbytes = static_cast<std::size_t>(frame.width()) * 3 * bytes;
    std::vector<png_byte> pixels(rowbytes * static_cast<std::size_t>(frame.height()));
    const auto in = frame.values();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const std::uint32_t q = quantize(in[i], maxval);
        if (depth == 16) {
            pixels[2 * i] = static_cast<png_byte>(q >> 8);
            pixels[2 * i + 1] = static_cast<png_byte>(q & 0xff);
        } else {
            pixels[i] = static_cast<png_byte>(q);
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(frame.height()));
    for (std::size_t y = 0; y < rows.size(); ++y) {
        rows[y] = pixels.data() + y * rowbytes;
    }

    FilePtr file = open_file(path, "wb");
    PngError err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
    if (png == nullptr) {
        throw IoError("png: out of memory writing '" + path.string() + "'");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("error writing '" + path.string() + "': " + err.message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(frame.width()), static_cast<png_uint_32>(frame.height()), depth,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

// ----------------------------------------------------------------------------
// PPM (binary P6)

FrameTensor load_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    auto fail = [&](const std::string& why) -> FormatError { return FormatError(path.string() + ": " + why); };
    auto next_token = [&]() {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) {
                    break;
                }
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    };
    if (next_token() != "P6") {
        throw fail("not a binary PPM (P6)");
    }
    long w = 0, h = 0, maxval = 0;
    try {
        w = std::stol(next_token());
        h = std::stol(next_token());
        maxval = std::stol(next_token());
    } catch (const std::exception&) {
        throw fail("malformed PPM header");
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw fail("PPM header values out of range");
    }
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    std::vector<unsigned char> data(count * bytes);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (static_cast<std::size_t>(in.gcount()) != data.size()) {
        throw fail("truncated PPM pixel data");
    }
    FrameTensor f(static_cast<int>(h), static_cast<int>(w), 3);
    auto out = f.values();
    const double scale = static_cast<double>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = bytes == 2 ? (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1] : data[i];
        if (v > static_cast<unsigned>(maxval)) {
            throw fail("PPM sample exceeds maxval");
        }
        out[i] = static_cast<float>(v / scale);
    }
    return f;
}

void save_ppm(const FrameTensor& frame, const std::filesystem::path& path, int depth) {
    const std::uint32_t maxval = depth == 16 ? 65535u : 255u;
    std::ostringstream header;
    header << "P6\n" << frame.width() << ' ' << frame.height() << '\n' << maxval << '\n';
    std::vector<std::uint8_t> out;
    const std::string h = header.str();
    out.insert(out.end(), h.begin(), h.end());
    for (float v : frame.values()) {
        const std::uint32_t q = quantize(v, maxval);
        if (depth == 16) {
            out.push_back(static_cast<std::uint8_t>(q >> 8));
        }
        out.push_back(static_cast<std::uint8_t>(q & 0xff));
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

bool is_frame_file(const std::filesystem::path& p) {
    const std::string ext = lower_extension(p);
    return ext == ".png" || ext == ".ppm";
}

}  // namespace

FrameTensor load_image(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        return load_png(path);
    }
    if (ext == ".ppm") {
        return load_ppm(path);
    }
    throw FormatError(path.string() + ": unsupported image type (expected .png or .ppm)");
}

void save_image(const FrameTensor& frame, const std::filesystem::path& path, ImageFormat format) {
    require_rgb(frame, "save_image");
    if (format == ImageFormat::png8 || format == ImageFormat::png16) {
        save_png(frame, path, bit_depth(format));
    } else {
        save_ppm(frame, path, bit_depth(format));
    }
}

std::vector<std::filesystem::path> list_frames(const std::string& dir_or_pattern) {
    namespace fs = std::filesystem;
    const fs::path p(dir_or_pattern);
    std::vector<fs::path> out;
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
        for (const auto& entry : fs::directory_iterator(p, ec)) {
            if (entry.is_regular_file() && is_frame_file(entry.path())) {
                out.push_back(entry.path());
            }
        }
        if (ec) {
            throw IoError("cannot list '" + p.string() + "': " + ec.message());
        }
    } else if (p.filename().string().find_first_of("*?[") != std::string::npos) {
        const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
        if (!fs::is_directory(dir, ec)) {
            throw IoError("no such directory '" + dir.string() + "'");
        }
        const std::string pattern = p.filename().string();
        for (const auto& entry : fs::directory_iterator(dir, ec)) {
            if (entry.is_regular_file() && fnmatch(pattern.c_str(), entry.path().filename().c_str(), 0) == 0) {
                out.push_back(entry.path());
            }
        }
    } else if (fs::is_regular_file(p, ec)) {
        out.push_back(p);
    } else {
        throw IoError("no such file or directory '" + p.string() + "'");
    }
    std::sort(out.begin(), out.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return out;
}

ClipSequence load_frames(const std::string& dir_or_pattern, double fps) {
    const auto files = list_frames(dir_or_pattern);
    if (files.empty()) {
        throw EmptySequenceError("no frames found at '" + dir_or_pattern + "'");
    }
    ClipSequence clip;
    clip.fps = fps;
    clip.source = dir_or_pattern;
    clip.frames.reserve(files.size());
    for (const auto& f : files) {
        clip.frames.push_back(load_image(f));
        const auto& first = clip.frames.front();
        const auto& last = clip.frames.back();
        if (last.height() != first.height() || last.width() != first.width()) {
            throw FormatError(f.string() + ": frame size " + std::to_string(last.width()) + "x" +
                              std::to_string(last.height()) + " differs from " + std::to_string(first.width()) + "x" +
                              std::to_string(first.height()));
        }
    }
    return clip;
}

std::vector<std::filesystem::path> save_frames(const ClipSequence& clip, const std::filesystem::path& dir,
                                               ImageFormat format, const std::string& prefix) {
    clip.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        std::ostringstream name;
        name << prefix << std::setw(6) << std::setfill('0') << i << extension(format);
        const auto path = dir / name.str();
        save_image(clip.frames[i], path, format);
        written.push_back(path);
    }
    return written;
}

}  // namespace wavelut

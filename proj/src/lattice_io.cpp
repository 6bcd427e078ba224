//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "wavelut/lattice_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wavelut {

namespace {

class ByteWriter {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v & 0xff));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void f32(float f) {
        const auto v = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& b) : b_(b) {}

    void need(std::size_t n) const {
        if (pos_ + n > b_.size()) {
            throw FormatError("WLUT4D: truncated file");
        }
    }
    const std::uint8_t* bytes(std::size_t n) {
        need(n);
        const auto* p = b_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::uint8_t u8() { return *bytes(1); }
    std::uint16_t u16() {
        const auto* p = bytes(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }
    float f32() {
        const auto* p = bytes(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        }
        return std::bit_cast<float>(v);
    }
    std::size_t remaining() const { return b_.size() - pos_; }

private:
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_wlut4d(const Lattice4D& lut) {
    if (lut.n() > 0xffff) {
        throw InvalidArgument("WLUT4D: n does not fit in 16 bits");
    }
    ByteWriter w;
    w.bytes(kWlut4dMagic, sizeof kWlut4dMagic);
    w.u16(kWlut4dVersion);
    w.u16(static_cast<std::uint16_t>(lut.n()));
    const bool uniform = lut.uniform_axes();
    w.u8(uniform ? 0 : 1);
    if (!uniform) {
        for (const auto& axis : lut.axes()) {
            for (float c : axis.coords()) {
                w.f32(c);
            }
        }
    }
    for (float v : lut.values()) {
        w.f32(v);
    }
    return w.take();
}

Lattice4D decode_wlut4d(const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes);
    if (std::memcmp(r.bytes(sizeof kWlut4dMagic), kWlut4dMagic, sizeof kWlut4dMagic) != 0) {
        throw FormatError("WLUT4D: bad magic");
    }
    const std::uint16_t version = r.u16();
    if (version != kWlut4dVersion) {
        throw FormatError("WLUT4D: unsupported version " + std::to_string(version));
    }
    const int n = r.u16();
    if (n < 2) {
        throw FormatError("WLUT4D: n must be >= 2");
    }
    const std::uint8_t mode = r.u8();
    std::array<CoordinateAxis, 4> axes;
    if (mode == 0) {
        axes.fill(CoordinateAxis::uniform(n));
    } else if (mode == 1) {
        for (auto& axis : axes) {
            std::vector<float> c(static_cast<std::size_t>(n));
            for (auto& v : c) {
                v = r.f32();
            }
            try {
                axis = CoordinateAxis(std::move(c));
            } catch (const InvalidArgument& e) {
                throw FormatError(std::string("WLUT4D: invalid axis: ") + e.what());
            }
        }
    } else {
        throw FormatError("WLUT4D: unknown axis mode " + std::to_string(mode));
    }
    const std::size_t count = static_cast<std::size_t>(n) * n * n * n * 3;
    r.need(count * 4);
    if (r.remaining() != count * 4) {
        throw FormatError("WLUT4D: trailing bytes after value block");
    }
    std::vector<float> values(count);
    for (auto& v : values) {
        v = r.f32();
    }
    try {
        return Lattice4D(std::move(axes), std::move(values));
    } catch (const NumericError& e) {
        throw FormatError(std::string("WLUT4D: ") + e.what());
    }
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

void save_wlut4d(const Lattice4D& lut, const std::filesystem::path& path) {
    write_file_bytes(path, encode_wlut4d(lut));
}

Lattice4D load_wlut4d(const std::filesystem::path& path) {
    try {
        return decode_wlut4d(read_file_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

// ----------------------------------------------------------------------------
// .cube

Lattice3D parse_cube(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    std::vector<float> values;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line.substr(first));
        std::string key;
        fields >> key;
        if (key == "TITLE" || key == "LUT_1D_INPUT_RANGE") {
            continue;
        }
        if (key == "LUT_1D_SIZE") {
            throw FormatError(".cube: 1D LUTs are not supported");
        }
        if (key == "LUT_3D_SIZE") {
            fields >> n;
            if (!fields || n < 2) {
                throw FormatError(".cube: invalid LUT_3D_SIZE on line " + std::to_string(line_no));
            }
            values.reserve(static_cast<std::size_t>(n) * n * n * 3);
            continue;
        }
        if (key == "DOMAIN_MIN" || key == "DOMAIN_MAX") {
            const float expect = key == "DOMAIN_MIN" ? 0.0f : 1.0f;
            float a = 0, b = 0, c = 0;
            fields >> a >> b >> c;
            if (!fields || a != expect || b != expect || c != expect) {
                throw FormatError(".cube: only the [0, 1] domain is supported");
            }
            continue;
        }
        if (key == "LUT_3D_INPUT_RANGE") {
            float lo = 0, hi = 0;
            fields >> lo >> hi;
            if (!fields || lo != 0.0f || hi != 1.0f) {
                throw FormatError(".cube: only the [0, 1] input range is supported");
            }
            continue;
        }
        // Data line: three floats.
        std::istringstream data(line.substr(first));
        float r = 0, g = 0, b = 0;
        data >> r >> g >> b;
        if (!data) {
            throw FormatError(".cube: cannot parse line " + std::to_string(line_no));
        }
        values.push_back(r);
        values.push_back(g);
        values.push_back(b);
    }
    if (n == 0) {
        throw FormatError(".cube: missing LUT_3D_SIZE");
    }
    const auto axis = CoordinateAxis::uniform(n);
    try {
        return Lattice3D({axis, axis, axis}, std::move(values));
    } catch (const ShapeError&) {
        throw FormatError(".cube: entry count does not match LUT_3D_SIZE");
    } catch (const NumericError&) {
        throw FormatError(".cube: non-finite entry");
    }
}

std::string format_cube(const Lattice3D& lut, const std::string& title) {
    if (!lut.uniform_axes()) {
        throw InvalidArgument(".cube: non-uniform axes cannot be represented");
    }
    std::ostringstream out;
    out << std::setprecision(9);
    if (!title.empty()) {
        out << "TITLE \"" << title << "\"\n";
    }
    out << "LUT_3D_SIZE " << lut.n() << "\n";
    out << "DOMAIN_MIN 0 0 0\nDOMAIN_MAX 1 1 1\n";
    const auto v = lut.values();
    for (std::size_t i = 0; i < v.size(); i += 3) {
        out << v[i] << ' ' << v[i + 1] << ' ' << v[i + 2] << '\n';
    }
    return out.str();
}

Lattice3D load_cube(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return parse_cube(std::string(bytes.begin(), bytes.end()));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_cube(const Lattice3D& lut, const std::filesystem::path& path, const std::string& title) {
    const std::string text = format_cube(lut, title);
    write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

Lattice3D slice_at_prior(const Lattice4D& lut, float e) {
    clamp_unit(e);
    const CellLocation loc = lut.axis(3).locate(e);
    const int n = lut.n();
    const auto& a = lut.axes();
    Lattice3D out({a[0], a[1], a[2]}, std::vector<float>(static_cast<std::size_t>(n) * n * n * 3));
    for (int z = 0; z < n; ++z) {
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                const auto lo = lut.entry({x, y, z, loc.index});
                const auto hi = lut.entry({x, y, z, loc.index + 1});
                std::array<float, 3> v{};
                for (int c = 0; c < 3; ++c) {
                    v[c] = (1.0f - loc.offset) * lo[c] + loc.offset * hi[c];
                }
                out.set_entry({x, y, z}, v);
            }
        }
    }
    return out;
}

}  // namespace wavelut

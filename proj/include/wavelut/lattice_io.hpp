//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wavelut/lattice.hpp"

namespace wavelut {

/// WLUT4D binary layout (all multi-byte fields little-endian):
///
///   offset  size  field
///   0       7     magic "WLUT4D\0"
///   7       2     version (u16, currently 1)
///   9       2     n (u16, >= 2)
///   11      1     axis mode (u8: 0 = uniform, 1 = explicit)
///   12      ...   explicit mode only: 4 * n f32 axis coordinates, in the
///                 order R, G, B, E
///   ...     ...   n^4 * 3 f32 values; entry (x, y, z, s) of the R, G, B, E
///                 indices starts at value ((s * n + z) * n + y) * n + x,
///                 times 3, holding R, G, B
///
/// Files are written in uniform mode when every axis is uniform. A round
/// trip reproduces the stored floats bit for bit.
inline constexpr char kWlut4dMagic[7] = {'W', 'L', 'U', 'T', '4', 'D', '\0'};
inline constexpr std::uint16_t kWlut4dVersion = 1;

std::vector<std::uint8_t> encode_wlut4d(const Lattice4D& lut);
Lattice4D decode_wlut4d(const std::vector<std::uint8_t>& bytes);

void save_wlut4d(const Lattice4D& lut, const std::filesystem::path& path);
Lattice4D load_wlut4d(const std::filesystem::path& path);

/// Adobe/Resolve style .cube text (LUT_3D_SIZE, optional DOMAIN_MIN/MAX of
/// 0 0 0 / 1 1 1, red index fastest). Uniform axes only.
Lattice3D parse_cube(const std::string& text);
std::string format_cube(const Lattice3D& lut, const std::string& title = "");

Lattice3D load_cube(const std::filesystem::path& path);
void save_cube(const Lattice3D& lut, const std::filesystem::path& path, const std::string& title = "");

/// The 3D lattice obtained by fixing the prior coordinate at `e`.
Lattice3D slice_at_prior(const Lattice4D& lut, float e);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace wavelut

//
// Copyright (C) 2026 The wavelut authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wavelut/frame.hpp"

namespace wavelut {

/// On-disk sample formats for frame sequences.
enum class ImageFormat { png8, png16, ppm8, ppm16 };

ImageFormat parse_image_format(const std::string& text);
std::string to_string(ImageFormat format);
int bit_depth(ImageFormat format) noexcept;
std::string extension(ImageFormat format);

/// An ordered run of equally sized RGB frames.
struct ClipSequence {
    std::vector<FrameTensor> frames;
    double fps = 30.0;
    std::filesystem::path source;

    std::size_t size() const noexcept { return frames.size(); }
    bool empty() const noexcept { return frames.empty(); }

    /// Throws FormatError if frames differ in size or are not 3-channel.
    void validate() const;
};

/// Read one PNG (8 or 16 bit; grey, grey+alpha, RGB, RGBA or palette) or
/// binary PPM (P6, maxval up to 65535) as RGB in [0, 1]. Alpha is dropped.
FrameTensor load_image(const std::filesystem::path& path);

/// Write an RGB frame. Values are clamped to [0, 1], scaled by 2^bits - 1
/// and rounded half to even.
void save_image(const FrameTensor& frame, const std::filesystem::path& path, ImageFormat format);

/// Frame files named by a directory (every .png / .ppm inside it) or by a
/// glob on the file name ("dir/frame_*.png"), in lexicographic order.
std::vector<std::filesystem::path> list_frames(const std::string& dir_or_pattern);

/// Throws EmptySequenceError when nothing matches, FormatError on mixed
/// frame sizes and IoError (naming the path) for unreadable files.
ClipSequence load_frames(const std::string& dir_or_pattern, double fps = 30.0);

/// Writes <prefix><index, 6 digits>.<ext> into `dir`, creating it if needed.
/// Returns the written paths in frame order.
std::vector<std::filesystem::path> save_frames(const ClipSequence& clip, const std::filesystem::path& dir,
                                               ImageFormat format, const std::string& prefix = "frame_");

}  // namespace wavelut

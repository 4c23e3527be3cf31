// Copyright (c) 2026 The cgdiqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cgdiqa/image.hpp"

namespace cgdiqa {

inline constexpr int kDefaultDownsampleLimit = 1000;

/// BT.601 luma, round(0.299 R + 0.587 G + 0.114 B).
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Decodes a binary PGM ("P5", maxval 255). Header comments are accepted.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

/// Encodes as "P5\n<w> <h>\n255\n" followed by the raster.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

/// Decodes an 8-bit grayscale or RGB PNG. Palette, alpha and 16-bit inputs are
/// reduced to one of those first.
GrayImage decode_png(std::span<const std::uint8_t> bytes);

/// Reads a PGM or PNG file, detected by magic bytes.
GrayImage load_image(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// Returns `img` unchanged when both sides are <= limit. Otherwise rescales so
/// the longest side becomes `limit`, bilinear, samples rounded.
GrayImage downsample_if_large(const GrayImage& img,
                              int limit = kDefaultDownsampleLimit);

}  // namespace cgdiqa

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
#include <vector>

#include "cgdiqa/image.hpp"

namespace cgdiqa {

struct BlurSpec {
  double sigma = 0.0;
  int kernel_radius = -1;  ///< -1 selects ceil(3 sigma)

  int radius() const;
};

/// Normalized 1-D Gaussian taps, index 0 is offset -radius.
std::vector<double> gaussian_kernel(const BlurSpec& blur);

/// Separable Gaussian with replicate padding, rounded and clamped to [0,255].
/// sigma = 0 returns the input unchanged.
GrayImage gaussian_blur(const GrayImage& img, const BlurSpec& blur);

/// Real-valued variant, no rounding.
std::vector<double> gaussian_blur(int width, int height,
                                  const std::vector<double>& samples,
                                  const BlurSpec& blur);

inline constexpr int kDefaultPageWidth = 800;
inline constexpr int kDefaultPageHeight = 600;

/// Deterministic synthetic page: white background with a grid of dark
/// glyph-like shapes (bars, L-shapes, rings, crosses) sized 6-40 px.
GrayImage make_test_page(int width = kDefaultPageWidth,
                         int height = kDefaultPageHeight,
                         std::uint32_t seed = 1);

}  // namespace cgdiqa

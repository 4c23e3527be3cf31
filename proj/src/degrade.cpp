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

#include "cgdiqa/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cgdiqa/errors.hpp"

namespace cgdiqa {

int BlurSpec::radius() const {
  if (kernel_radius >= 0) return kernel_radius;
  return static_cast<int>(std::ceil(3.0 * sigma));
}

std::vector<double> gaussian_kernel(const BlurSpec& blur) {
  if (!(blur.sigma >= 0)) throw ContractError("blur sigma must be >= 0");
  const int r = blur.radius();
  if (blur.sigma == 0 || r == 0) return {1.0};
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * blur.sigma * blur.sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

std::vector<double> gaussian_blur(int width, int height,
                                  const std::vector<double>& samples,
                                  const BlurSpec& blur) {
  if (width <= 0 || height <= 0 ||
      samples.size() != static_cast<std::size_t>(width) * height) {
    throw ContractError("gaussian_blur: bad raster dimensions");
  }
  const auto k = gaussian_kernel(blur);
  const int r = static_cast<int>(k.size() / 2);
  if (r == 0) return samples;
  std::vector<double> tmp(samples.size());
  std::vector<double> out(samples.size());
  for (int y = 0; y < height; ++y) {
    const double* row = samples.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k[i + r] * row[std::clamp(x + i, 0, width - 1)];
      }
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = std::clamp(y + i, 0, height - 1);
        acc += k[i + r] * tmp[static_cast<std::size_t>(yy) * width + x];
      }
      out[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, const BlurSpec& blur) {
  if (!(blur.sigma >= 0)) throw ContractError("blur sigma must be >= 0");
  if (blur.sigma == 0) return img;
  std::vector<double> real(img.pixels().begin(), img.pixels().end());
  const auto blurred = gaussian_blur(img.width(), img.height(), real, blur);
  std::vector<std::uint8_t> data(blurred.size());
  for (std::size_t i = 0; i < blurred.size(); ++i) {
    data[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(blurred[i]), 0L, 255L));
  }
  return GrayImage(img.width(), img.height(), std::move(data));
}

namespace {

// Raw engine output only: distribution objects are not portable across
// standard libraries.
class PageRng {
 public:
  explicit PageRng(std::uint32_t seed) : engine_(seed) {}
  int uniform(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint32_t>(hi - lo + 1));
  }

 private:
  std::mt19937 engine_;
};

void fill_rect(GrayImage& img, int x0, int y0, int x1, int y1,
               std::uint8_t ink) {
  for (int y = std::max(y0, 0); y <= std::min(y1, img.height() - 1); ++y) {
    for (int x = std::max(x0, 0); x <= std::min(x1, img.width() - 1); ++x) {
      img(x, y) = ink;
    }
  }
}

}  // namespace

GrayImage make_test_page(int width, int height, std::uint32_t seed) {
  if (width < 64 || height < 64) {
    throw ContractError("test page must be at least 64x64");
  }
  constexpr int kMargin = 8;
  constexpr int kLinePitch = 44;
  constexpr int kMaxGlyphHeight = 40;
  // Glyph boxes stay under the default detector area cap of the page.
  const int max_box = std::max(36, static_cast<int>(0.001 * width * height) - 40);

  GrayImage page(width, height, 255);
  PageRng rng(seed);

  for (int base = kMargin + kMaxGlyphHeight; base < height - kMargin;
       base += kLinePitch) {
    int x = kMargin + rng.uniform(0, 12);
    while (true) {
      const int letters = rng.uniform(2, 6);
      // Ink level is shared across a word, as with a single print run.
      const auto ink = static_cast<std::uint8_t>(rng.uniform(0, 60));
      bool line_full = false;
      for (int l = 0; l < letters; ++l) {
        int gw = 0;
        int gh = 0;
        do {
          gw = rng.uniform(6, 40);
          gh = rng.uniform(6, 40);
        } while (gw > 4 * gh || gh > 4 * gw || gw * gh > max_box);
        if (x + gw >= width - kMargin) {
          line_full = true;
          break;
        }
        const int stroke = rng.uniform(2, 3);
        const int ox = x;
        const int oy = base - gh;
        const int x1 = ox + gw - 1;
        const int y1 = oy + gh - 1;
        switch (rng.uniform(0, 3)) {
          case 0:  // bar
            fill_rect(page, ox, oy, x1, y1, ink);
            break;
          case 1:  // L
            fill_rect(page, ox, oy, ox + stroke - 1, y1, ink);
            fill_rect(page, ox, y1 - stroke + 1, x1, y1, ink);
            break;
          case 2:  // ring
            fill_rect(page, ox, oy, x1, oy + stroke - 1, ink);
            fill_rect(page, ox, y1 - stroke + 1, x1, y1, ink);
            fill_rect(page, ox, oy, ox + stroke - 1, y1, ink);
            fill_rect(page, x1 - stroke + 1, oy, x1, y1, ink);
            break;
          default: {  // cross
            const int cx = ox + gw / 2 - stroke / 2;
            const int cy = oy + gh / 2 - stroke / 2;
            fill_rect(page, cx, oy, cx + stroke - 1, y1, ink);
            fill_rect(page, ox, cy, x1, cy + stroke - 1, ink);
            break;
          }
        }
        x += gw + rng.uniform(2, 3);
      }
      if (line_full) break;
      x += rng.uniform(10, 16);
      if (x >= width - kMargin - 6) break;
    }
  }
  return page;
}

}  // namespace cgdiqa

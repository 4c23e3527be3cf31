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

#include "cgdiqa/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace cgdiqa {
namespace {

template <class Sample>
GradientField sobel_impl(int w, int h, Sample&& at) {
  GradientField field{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, w - 1);
      const double a = at(xm, ym), b = at(x, ym), c = at(xp, ym);
      const double d = at(xm, y), f = at(xp, y);
      const double g = at(xm, yp), k = at(x, yp), l = at(xp, yp);
      const double gx = (c - a) + 2.0 * (f - d) + (l - g);
      const double gy = (g - a) + 2.0 * (k - b) + (l - c);
      field.mag[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return field;
}

}  // namespace

GradientField sobel_gradient(const GrayImage& img) {
  if (img.empty()) throw ContractError("sobel_gradient of an empty image");
  return sobel_impl(img.width(), img.height(),
                    [&](int x, int y) { return static_cast<double>(img(x, y)); });
}

GradientField sobel_gradient(int width, int height,
                             const std::vector<double>& samples) {
  if (width <= 0 || height <= 0 ||
      samples.size() != static_cast<std::size_t>(width) * height) {
    throw ContractError("sobel_gradient: bad raster dimensions");
  }
  return sobel_impl(width, height, [&](int x, int y) {
    return samples[static_cast<std::size_t>(y) * width + x];
  });
}

QualityScore pool_score(const GradientField& field,
                        const std::vector<CharacterPatch>& patches) {
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const Box& b = patches[i].bbox;
    if (b.x_min < 0 || b.y_min < 0 || b.x_max >= field.width ||
        b.y_max >= field.height || b.x_min > b.x_max || b.y_min > b.y_max) {
      throw ContractError(
          "patch " + std::to_string(i) + " (" + std::to_string(b.x_min) + "," +
          std::to_string(b.y_min) + "," + std::to_string(b.x_max) + "," +
          std::to_string(b.y_max) + ") outside " + std::to_string(field.width) +
          "x" + std::to_string(field.height) + " gradient field");
    }
  }
  QualityScore s;
  s.patch_count = patches.size();
  if (patches.empty()) return s;

  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : patches) {
    for (int y = p.bbox.y_min; y <= p.bbox.y_max; ++y) {
      for (int x = p.bbox.x_min; x <= p.bbox.x_max; ++x) sum += field(x, y);
    }
    n += p.bbox.pixel_count();
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (const auto& p : patches) {
    for (int y = p.bbox.y_min; y <= p.bbox.y_max; ++y) {
      for (int x = p.bbox.x_min; x <= p.bbox.x_max; ++x) {
        const double d = field(x, y) - mean;
        sq += d * d;
      }
    }
  }
  s.pixel_count = n;
  s.mean_gradient = mean;
  s.value = std::sqrt(sq / static_cast<double>(n));
  s.degenerate = false;
  return s;
}

ImageScore score_image(const GrayImage& img, const ScoringOptions& opts) {
  opts.mser.validate();
  ImageScore out;
  out.preprocessed = downsample_if_large(img, opts.downsample_limit);
  out.patches = extract_character_patches(out.preprocessed, opts.mser);
  out.score = pool_score(sobel_gradient(out.preprocessed), out.patches);
  return out;
}

QualityScore score_document(const std::filesystem::path& path,
                            const ScoringOptions& opts) {
  return score_image(load_image(path), opts).score;
}

QualityScore score_document(const std::filesystem::path& path,
                            const MserParams& params) {
  return score_document(path, ScoringOptions{params, kDefaultDownsampleLimit});
}

std::string score_to_json(const std::string& path, const QualityScore& s) {
  nlohmann::ordered_json j;
  j["path"] = path;
  j["score"] = s.value;
  j["patch_count"] = s.patch_count;
  j["pixel_count"] = s.pixel_count;
  j["mean_gradient"] = s.mean_gradient;
  j["degenerate"] = s.degenerate;
  return j.dump();
}

}  // namespace cgdiqa

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

#include <filesystem>
#include <string>
#include <vector>

#include "cgdiqa/image.hpp"
#include "cgdiqa/imgio.hpp"
#include "cgdiqa/mser.hpp"

namespace cgdiqa {

/// Per-pixel Sobel gradient magnitude, row-major.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> mag;

  double operator()(int x, int y) const noexcept {
    return mag[static_cast<std::size_t>(y) * width + x];
  }
};

struct QualityScore {
  double value = 0.0;
  std::size_t patch_count = 0;
  std::size_t pixel_count = 0;
  double mean_gradient = 0.0;
  bool degenerate = true;
};

/// Sobel magnitude sqrt(gx^2 + gy^2) with replicate-edge padding.
GradientField sobel_gradient(const GrayImage& img);

/// Same filter over a real-valued raster.
GradientField sobel_gradient(int width, int height,
                             const std::vector<double>& samples);

/// Standard deviation of magnitudes over all patch pixels. A pixel covered by
/// k patches contributes k times.
QualityScore pool_score(const GradientField& field,
                        const std::vector<CharacterPatch>& patches);

struct ScoringOptions {
  MserParams mser;
  int downsample_limit = kDefaultDownsampleLimit;
};

struct ImageScore {
  QualityScore score;
  std::vector<CharacterPatch> patches;
  GrayImage preprocessed;
};

/// Downsample, detect patches, gradient over the whole image, pool.
ImageScore score_image(const GrayImage& img, const ScoringOptions& opts);

QualityScore score_document(const std::filesystem::path& path,
                            const MserParams& params);
QualityScore score_document(const std::filesystem::path& path,
                            const ScoringOptions& opts);

/// {"path","score","patch_count","pixel_count","mean_gradient","degenerate"}
std::string score_to_json(const std::string& path, const QualityScore& s);

}  // namespace cgdiqa

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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgdiqa/eval.hpp"
#include "cgdiqa/scoring.hpp"

namespace cgdiqa {

struct BatchItem {
  std::string path;
  std::optional<QualityScore> score;
  std::string error;  ///< set when score is empty
};

/// Resolves a worker count: `requested` if > 0, else CGDIQA_WORKERS if set
/// and positive, else hardware concurrency.
unsigned resolve_workers(int requested);

/// Scores every path on a pool of `workers` threads. Results are in input
/// order; per-file failures are captured in BatchItem::error. `on_image`, if
/// set, is called from worker threads with the full result of each success.
std::vector<BatchItem> score_batch(
    const std::vector<std::string>& paths, const ScoringOptions& opts,
    unsigned workers,
    const std::function<void(std::size_t, const ImageScore&)>& on_image = {});

/// Scores every manifest image then evaluates. Throws Error on the first
/// image that fails to score.
EvalReport score_and_evaluate(const DatasetManifest& manifest,
                              const ScoringOptions& opts, Engine engine,
                              unsigned workers);

std::vector<EvalReport> score_and_evaluate(const DatasetManifest& manifest,
                                           const ScoringOptions& opts,
                                           const std::vector<Engine>& engines,
                                           unsigned workers);

}  // namespace cgdiqa

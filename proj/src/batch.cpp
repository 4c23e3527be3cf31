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

#include "cgdiqa/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

namespace cgdiqa {

unsigned resolve_workers(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("CGDIQA_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BatchItem> score_batch(
    const std::vector<std::string>& paths, const ScoringOptions& opts,
    unsigned workers,
    const std::function<void(std::size_t, const ImageScore&)>& on_image) {
  opts.mser.validate();
  std::vector<BatchItem> items(paths.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      BatchItem& item = items[i];
      item.path = paths[i];
      try {
        ImageScore result = score_image(load_image(paths[i]), opts);
        if (on_image) on_image(i, result);
        item.score = result.score;
      } catch (const std::exception& e) {
        item.error = e.what();
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(
      workers, 1u, static_cast<unsigned>(std::max<std::size_t>(paths.size(), 1)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  return items;
}

std::vector<EvalReport> score_and_evaluate(const DatasetManifest& manifest,
                                           const ScoringOptions& opts,
                                           const std::vector<Engine>& engines,
                                           unsigned workers) {
  // Each distinct image is scored once.
  std::set<std::string> unique;
  for (const auto& row : manifest.rows) unique.insert(row.image_path);
  const std::vector<std::string> paths(unique.begin(), unique.end());
  std::map<std::string, double> scores;
  for (const auto& item : score_batch(paths, opts, workers)) {
    if (!item.score) {
      throw Error("failed to score " + item.path + ": " + item.error);
    }
    scores[item.path] = item.score->value;
  }
  std::vector<EvalReport> reports;
  for (Engine e : engines) reports.push_back(evaluate(manifest, scores, e));
  return reports;
}

EvalReport score_and_evaluate(const DatasetManifest& manifest,
                              const ScoringOptions& opts, Engine engine,
                              unsigned workers) {
  return score_and_evaluate(manifest, opts, std::vector<Engine>{engine},
                            workers)
      .front();
}

}  // namespace cgdiqa

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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cgdiqa {

enum class Engine { kFineReader, kTesseract, kOmnipage, kAverage };

std::optional<Engine> parse_engine(const std::string& s);
std::string to_string(Engine e);

struct ManifestRow {
  std::string image_path;
  std::string doc_id;
  std::optional<double> acc_finereader;
  std::optional<double> acc_tesseract;
  std::optional<double> acc_omnipage;
  std::size_t line = 0;  ///< 1-based source line, 0 if built in memory
};

struct DatasetManifest {
  std::vector<ManifestRow> rows;
};

/// Parses the `image_path,doc_id,acc_finereader,acc_tesseract,acc_omnipage`
/// CSV. Relative image paths are resolved against `base_dir` when given.
DatasetManifest parse_manifest(const std::string& text,
                               const std::filesystem::path& base_dir = {});
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Accuracy of `row` for `engine`. Average needs all three engines. Throws
/// ManifestError naming the row.
double accuracy_for(const ManifestRow& row, Engine engine);

/// Sample Pearson correlation, clamped to [-1, 1]. Throws UndefinedCorrelation
/// when n < 2, lengths differ, or either vector is constant.
double pearson_lcc(std::span<const double> x, std::span<const double> y);

/// Fractional ranks starting at 1; ties share their average rank.
std::vector<double> fractional_ranks(std::span<const double> v);

/// Pearson correlation of fractional ranks.
double spearman_srocc(std::span<const double> x, std::span<const double> y);

/// Median; the mean of the two middle values for even counts.
double median(std::vector<double> v);

struct DocCorrelation {
  double lcc = 0.0;
  double srocc = 0.0;
  std::size_t rows = 0;
};

struct EvalReport {
  Engine engine = Engine::kAverage;
  std::map<std::string, DocCorrelation> per_doc;
  std::optional<double> median_lcc;
  std::optional<double> median_srocc;
  std::optional<double> global_lcc;
  std::optional<double> global_srocc;
  std::size_t row_count = 0;
  /// doc_id -> reason, for documents left out of the medians.
  std::map<std::string, std::string> excluded;
};

/// Document-wise LCC/SROCC with medians, plus the pooled global pair.
/// `scores` is keyed by ManifestRow::image_path.
EvalReport evaluate(const DatasetManifest& manifest,
                    const std::map<std::string, double>& scores, Engine engine);

std::string report_to_json(const EvalReport& report);
/// Per-document rows followed by a `__summary__` row.
std::string report_to_csv(const EvalReport& report);

}  // namespace cgdiqa

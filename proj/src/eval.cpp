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

#include "cgdiqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cgdiqa/errors.hpp"

namespace cgdiqa {

std::optional<Engine> parse_engine(const std::string& s) {
  if (s == "finereader") return Engine::kFineReader;
  if (s == "tesseract") return Engine::kTesseract;
  if (s == "omnipage") return Engine::kOmnipage;
  if (s == "average") return Engine::kAverage;
  return std::nullopt;
}

std::string to_string(Engine e) {
  switch (e) {
    case Engine::kFineReader:
      return "finereader";
    case Engine::kTesseract:
      return "tesseract";
    case Engine::kOmnipage:
      return "omnipage";
    case Engine::kAverage:
      return "average";
  }
  return "?";
}

namespace {

constexpr const char* kManifestColumns[] = {
    "image_path", "doc_id", "acc_finereader", "acc_tesseract", "acc_omnipage"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits one CSV record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ManifestError("unterminated quoted field", lineno);
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::optional<double> parse_accuracy(const std::string& cell,
                                     const char* column, std::size_t lineno) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || !std::isfinite(v)) {
    throw ManifestError(std::string(column) + " is not a number: '" + cell + "'",
                        lineno);
  }
  if (v < 0.0 || v > 1.0) {
    throw ManifestError(std::string(column) + " outside [0,1]: " + cell, lineno);
  }
  return v;
}

std::string row_name(const ManifestRow& row) {
  std::string name = "'" + row.image_path + "'";
  if (row.line != 0) name += " (line " + std::to_string(row.line) + ")";
  return name;
}

}  // namespace

DatasetManifest parse_manifest(const std::string& text,
                               const std::filesystem::path& base_dir) {
  DatasetManifest manifest;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line, lineno);
    if (!header_seen) {
      if (fields.size() != std::size(kManifestColumns)) {
        throw ManifestError("header must have 5 columns", lineno);
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != kManifestColumns[i]) {
          throw ManifestError(std::string("expected column '") +
                                  kManifestColumns[i] + "', got '" + fields[i] +
                                  "'",
                              lineno);
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != std::size(kManifestColumns)) {
      throw ManifestError("expected 5 fields, got " +
                              std::to_string(fields.size()),
                          lineno);
    }
    if (fields[0].empty()) throw ManifestError("empty image_path", lineno);
    if (fields[1].empty()) throw ManifestError("empty doc_id", lineno);
    ManifestRow row;
    std::filesystem::path p(fields[0]);
    row.image_path = (p.is_relative() && !base_dir.empty())
                         ? (base_dir / p).lexically_normal().string()
                         : fields[0];
    row.doc_id = fields[1];
    row.acc_finereader = parse_accuracy(fields[2], kManifestColumns[2], lineno);
    row.acc_tesseract = parse_accuracy(fields[3], kManifestColumns[3], lineno);
    row.acc_omnipage = parse_accuracy(fields[4], kManifestColumns[4], lineno);
    row.line = lineno;
    manifest.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ManifestError("manifest is empty", 0);
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), path.parent_path());
}

double accuracy_for(const ManifestRow& row, Engine engine) {
  auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) {
      throw ManifestError("row " + row_name(row) + " has no " + name +
                              " accuracy",
                          row.line);
    }
    return *v;
  };
  switch (engine) {
    case Engine::kFineReader:
      return need(row.acc_finereader, "finereader");
    case Engine::kTesseract:
      return need(row.acc_tesseract, "tesseract");
    case Engine::kOmnipage:
      return need(row.acc_omnipage, "omnipage");
    case Engine::kAverage:
      return (need(row.acc_finereader, "finereader") +
              need(row.acc_tesseract, "tesseract") +
              need(row.acc_omnipage, "omnipage")) /
             3.0;
  }
  return 0.0;
}

double pearson_lcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UndefinedCorrelation("correlation of vectors with different lengths");
  }
  const std::size_t n = x.size();
  if (n < 2) throw UndefinedCorrelation("correlation needs at least 2 samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelation("correlation with a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman_srocc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UndefinedCorrelation("correlation of vectors with different lengths");
  }
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson_lcc(rx, ry);
}

double median(std::vector<double> v) {
  if (v.empty()) throw ContractError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

EvalReport evaluate(const DatasetManifest& manifest,
                    const std::map<std::string, double>& scores,
                    Engine engine) {
  EvalReport report;
  report.engine = engine;

  struct Series {
    std::vector<std::pair<std::string, std::pair<double, double>>> points;
  };
  std::map<std::string, Series> docs;
  for (const auto& row : manifest.rows) {
    const auto it = scores.find(row.image_path);
    if (it == scores.end()) {
      throw ManifestError("row " + row_name(row) + " has no score", row.line);
    }
    docs[row.doc_id].points.push_back(
        {row.image_path, {it->second, accuracy_for(row, engine)}});
  }

  // Sort by image path so row order in the manifest cannot change sums.
  std::vector<std::pair<std::string, std::pair<double, double>>> pooled;
  std::vector<double> lccs, sroccs;
  for (auto& [doc, series] : docs) {
    std::sort(series.points.begin(), series.points.end());
    pooled.insert(pooled.end(), series.points.begin(), series.points.end());
    std::vector<double> s, a;
    for (const auto& [path, sa] : series.points) {
      s.push_back(sa.first);
      a.push_back(sa.second);
    }
    try {
      DocCorrelation c;
      c.lcc = pearson_lcc(s, a);
      c.srocc = spearman_srocc(s, a);
      c.rows = s.size();
      report.per_doc[doc] = c;
      lccs.push_back(c.lcc);
      sroccs.push_back(c.srocc);
    } catch (const UndefinedCorrelation& e) {
      report.excluded[doc] = e.what();
    }
  }
  if (!lccs.empty()) {
    report.median_lcc = median(lccs);
    report.median_srocc = median(sroccs);
  }
  std::sort(pooled.begin(), pooled.end());
  report.row_count = pooled.size();
  std::vector<double> s, a;
  for (const auto& [path, sa] : pooled) {
    s.push_back(sa.first);
    a.push_back(sa.second);
  }
  try {
    report.global_lcc = pearson_lcc(s, a);
    report.global_srocc = spearman_srocc(s, a);
  } catch (const UndefinedCorrelation& e) {
    report.excluded["__global__"] = e.what();
  }
  return report;
}

namespace {

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string opt_csv(const std::optional<double>& v) {
  if (!v) return {};
  std::ostringstream out;
  out.precision(17);
  out << *v;
  return out.str();
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["engine"] = to_string(report.engine);
  nlohmann::ordered_json per_doc = nlohmann::ordered_json::object();
  for (const auto& [doc, c] : report.per_doc) {
    per_doc[doc] = {{"lcc", c.lcc}, {"srocc", c.srocc}, {"rows", c.rows}};
  }
  j["per_doc"] = per_doc;
  j["median_lcc"] = opt_json(report.median_lcc);
  j["median_srocc"] = opt_json(report.median_srocc);
  j["global_lcc"] = opt_json(report.global_lcc);
  j["global_srocc"] = opt_json(report.global_srocc);
  j["row_count"] = report.row_count;
  nlohmann::ordered_json excluded = nlohmann::ordered_json::object();
  for (const auto& [doc, why] : report.excluded) excluded[doc] = why;
  j["excluded"] = excluded;
  return j.dump();
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  const std::string engine = to_string(report.engine);
  out << "engine,doc_id,lcc,srocc,rows\n";
  for (const auto& [doc, c] : report.per_doc) {
    out << engine << ',' << doc << ',' << c.lcc << ',' << c.srocc << ','
        << c.rows << '\n';
  }
  out << engine << ",__summary__," << opt_csv(report.median_lcc) << ','
      << opt_csv(report.median_srocc) << ',' << report.per_doc.size() << '\n';
  out << engine << ",__global__," << opt_csv(report.global_lcc) << ','
      << opt_csv(report.global_srocc) << ',' << report.row_count << '\n';
  return out.str();
}

}  // namespace cgdiqa

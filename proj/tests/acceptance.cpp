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

// Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "cgdiqa/batch.hpp"
#include "cgdiqa/degrade.hpp"
#include "cgdiqa/eval.hpp"
#include "cgdiqa/imgio.hpp"
#include "cgdiqa/mser.hpp"
#include "cgdiqa/scoring.hpp"
#include "oracles.hpp"
#include "png_writer.hpp"

namespace fs = std::filesystem;
using namespace cgdiqa;
using Clock = std::chrono::steady_clock;

namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

Verdict pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Verdict fail(std::string d) { return {Outcome::kFail, std::move(d)}; }
Verdict skip(std::string d) { return {Outcome::kSkip, std::move(d)}; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "cgdiqa_acceptance";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

const std::vector<double> kSigmas{0.0, 1.0, 2.0, 4.0};
constexpr std::uint32_t kPageSeeds[] = {1, 2, 3, 4, 5};

// 1. Sobel vs naive correlation, 200 random images 3x3..32x32, exact, < 5 s.
Verdict sobel_oracle() {
  std::mt19937 rng(2024);
  const auto t0 = Clock::now();
  for (int i = 0; i < 200; ++i) {
    const int w = 3 + rng() % 30, h = 3 + rng() % 30;
    const GrayImage img = oracle::random_image(rng, w, h, 256);
    if (sobel_gradient(img).mag != oracle::naive_sobel(img)) {
      return fail("mismatch on image " + std::to_string(i));
    }
  }
  const double t = seconds_since(t0);
  if (t >= 5.0) return fail("runtime " + fmt("%.2f s", t));
  return pass("200 images exact, " + fmt("%.3f s", t));
}

// 2. Component tree vs per-level labeling, 100 images <= 12x12, 8 levels, < 30 s.
Verdict tree_oracle() {
  std::mt19937 rng(77);
  const auto t0 = Clock::now();
  for (int i = 0; i < 100; ++i) {
    const int w = 1 + rng() % 12, h = 1 + rng() % 12;
    const GrayImage img = oracle::random_image(rng, w, h, 8);
    const auto tree = build_component_tree(img, Polarity::kDarkOnLight);
    const auto comps = oracle::brute_components(img, false);
    std::multiset<std::pair<oracle::NodeKey, oracle::NodeKey>> got, want;
    for (const auto& n : tree.nodes()) {
      got.insert({oracle::key_of(n),
                  n.parent == -1 ? oracle::NodeKey{} : oracle::key_of(tree.node(n.parent))});
    }
    for (const auto& c : comps) {
      want.insert({c.key, c.parent == -1 ? oracle::NodeKey{} : comps[c.parent].key});
    }
    if (got != want) return fail("node or parent mismatch on image " + std::to_string(i));
  }
  const double t = seconds_since(t0);
  if (t >= 30.0) return fail("runtime " + fmt("%.2f s", t));
  return pass("100 trees (nodes and parents) match, " + fmt("%.3f s", t));
}

// 3. Pooled deviation vs explicit enumeration, rel 1e-12, with overlaps.
Verdict pool_oracle() {
  struct Case {
    int w, h;
    std::vector<double> mag;
    std::vector<Box> boxes;
  };
  std::vector<Case> cases;
  cases.push_back({2, 1, {0, 10}, {{0, 0, 1, 0}}});
  cases.push_back({3, 1, {0, 10, 20}, {{0, 0, 1, 0}, {1, 0, 2, 0}}});
  cases.push_back({3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9},
                   {{0, 0, 2, 2}, {1, 1, 2, 2}, {1, 1, 1, 1}}});
  cases.push_back({4, 2, {0.5, 1020, 3, 3, 7.25, 0, 0, 19},
                   {{0, 0, 3, 1}, {0, 0, 0, 0}, {1, 0, 2, 1}}});
  std::mt19937 rng(5);
  for (int k = 0; k < 20; ++k) {
    Case c{16, 12, std::vector<double>(16 * 12), {}};
    for (double& m : c.mag) m = (rng() % 1000000) / 97.0;
    for (int b = 0; b < 4; ++b) {
      const int x0 = rng() % 16, y0 = rng() % 12;
      c.boxes.push_back({x0, y0, x0 + static_cast<int>(rng() % (16 - x0)),
                         y0 + static_cast<int>(rng() % (12 - y0))});
    }
    cases.push_back(c);
  }
  double worst = 0;
  for (const auto& c : cases) {
    std::vector<CharacterPatch> patches;
    for (const Box& b : c.boxes) patches.push_back({b});
    const auto s = pool_score(GradientField{c.w, c.h, c.mag}, patches);
    const auto want = oracle::enumerate_pool(c.w, c.mag, c.boxes);
    if (s.pixel_count != want.n) return fail("pixel count mismatch");
    const double ref = static_cast<double>(want.stdev);
    const double rel = std::abs(s.value - ref) / std::max(ref, 1e-300);
    worst = std::max(worst, rel);
  }
  // The literal double sum: overlapping samples {0,10,10,20} -> sqrt(50).
  const auto overlap = pool_score(GradientField{3, 1, {0, 10, 20}},
                                  {{{0, 0, 1, 0}}, {{1, 0, 2, 0}}});
  if (std::abs(overlap.value - std::sqrt(50.0)) > 1e-12 * std::sqrt(50.0)) {
    return fail("overlap case not double counted");
  }
  if (worst > 1e-12) return fail("worst relative error " + fmt("%.3g", worst));
  return pass(std::to_string(cases.size()) + " fields, worst rel err " + fmt("%.3g", worst));
}

// 4. Correlation fixtures with hand-derived values.
Verdict correlation_oracle() {
  struct Fixture {
    std::vector<double> x, y;
    double lcc, srocc;
  };
  const double s3 = std::sqrt(3.0) / 2.0;
  const std::vector<Fixture> fixtures = {
      {{1, 2, 3}, {2, 4, 6}, 1.0, 1.0},
      {{1, 2, 3}, {3, 2, 1}, -1.0, -1.0},
      {{1, 2, 3, 4}, {1, 3, 2, 4}, 0.8, 0.8},
      {{1, 2, 3}, {5, 5, 9}, s3, s3},
      {{1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}, 0.8, 0.8},
      {{1, 2, 3, 4}, {1, 1, 2, 2}, 2.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0)},
      {{1, 2, 3, 4}, {4, 1, 3, 2}, -0.4, -0.4},
      {{1, 2, 3, 4}, {1, 4, 9, 16}, 25.0 / std::sqrt(645.0), 1.0},
      {{1, 1, 2, 2}, {1, 2, 1, 2}, 0.0, 0.0},
      {{0, 0, 1}, {0, 1, 1}, 0.5, 0.5},
      {{10, 20, 30, 40}, {1, 3, 2, 4}, 0.8, 0.8},
      {{0.3, 0.1, 0.2}, {7, 3, 3}, s3, s3},
  };
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const auto& f = fixtures[i];
    const double l = pearson_lcc(f.x, f.y);
    const double s = spearman_srocc(f.x, f.y);
    if (std::abs(l - f.lcc) > 1e-12 || std::abs(s - f.srocc) > 1e-12) {
      return fail("fixture " + std::to_string(i) + ": lcc " + fmt("%.15g", l) +
                  " srocc " + fmt("%.15g", s));
    }
    if (s != pearson_lcc(oracle::brute_ranks(f.x), oracle::brute_ranks(f.y))) {
      return fail("Spearman != Pearson of ranks on fixture " + std::to_string(i));
    }
  }
  std::mt19937 rng(99);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 3 + rng() % 30;
    std::vector<double> x(n), y(n);
    std::vector<double> perm(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) + 0.5;
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i);
    std::shuffle(y.begin(), y.end(), rng);
    const double rho = spearman_srocc(x, y);
    if (rho != pearson_lcc(fractional_ranks(x), fractional_ranks(y))) {
      return fail("Spearman != Pearson of ranks");
    }
    const auto rx = fractional_ranks(x), ry = fractional_ranks(y);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double nd = static_cast<double>(n);
    worst = std::max(worst, std::abs(rho - (1.0 - 6.0 * d2 / (nd * (nd * nd - 1)))));
  }
  if (worst > 1e-12) return fail("shortcut identity off by " + fmt("%.3g", worst));
  return pass(std::to_string(fixtures.size()) + " fixtures; shortcut worst " + fmt("%.3g", worst));
}

struct PageRun {
  std::vector<double> scores;
  std::vector<std::size_t> patches;
};

const std::vector<PageRun>& page_runs() {
  static const std::vector<PageRun> runs = [] {
    std::vector<PageRun> out;
    for (std::uint32_t seed : kPageSeeds) {
      const GrayImage page = make_test_page(kDefaultPageWidth, kDefaultPageHeight, seed);
      PageRun run;
      for (double sigma : kSigmas) {
        const auto r = score_image(gaussian_blur(page, BlurSpec{sigma}), ScoringOptions{});
        run.scores.push_back(r.score.value);
        run.patches.push_back(r.score.patch_count);
      }
      out.push_back(run);
    }
    return out;
  }();
  return runs;
}

// 5. Score strictly decreasing in sigma, SROCC vs decreasing proxy = 1.
Verdict blur_monotonicity() {
  std::string detail;
  for (std::size_t p = 0; p < page_runs().size(); ++p) {
    const auto& s = page_runs()[p].scores;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (!(s[i] < s[i - 1])) {
        return fail("page " + std::to_string(p) + " not strictly decreasing at sigma " +
                    fmt("%g", kSigmas[i]));
      }
    }
    std::vector<double> proxy;
    for (double sigma : kSigmas) proxy.push_back(1.0 - sigma / 5.0);
    const double rho = spearman_srocc(s, proxy);
    if (rho != 1.0) return fail("page " + std::to_string(p) + " SROCC " + fmt("%.6f", rho));
    detail += (p ? " | " : "") + fmt("%.1f", s.front()) + ">" + fmt("%.1f", s.back());
  }
  return pass("5 pages, SROCC 1.0; " + detail);
}

// 6. Patch count non-increasing in sigma.
Verdict patch_trend() {
  std::string detail;
  for (std::size_t p = 0; p < page_runs().size(); ++p) {
    const auto& c = page_runs()[p].patches;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i] > c[i - 1]) {
        return fail("page " + std::to_string(p) + " count rose at sigma " + fmt("%g", kSigmas[i]));
      }
    }
    if (p == 0) {
      for (std::size_t i = 0; i < c.size(); ++i) detail += (i ? "/" : "") + std::to_string(c[i]);
    }
  }
  return pass("page 1 counts " + detail);
}

// 7. DIQA reproduction, gated on CGDIQA_DIQA_MANIFEST.
Verdict dataset_reproduction() {
  const char* manifest_path = std::getenv("CGDIQA_DIQA_MANIFEST");
  if (manifest_path == nullptr || !fs::exists(manifest_path)) {
    return skip("set CGDIQA_DIQA_MANIFEST to the DIQA manifest CSV to run");
  }
  const auto manifest = load_manifest(manifest_path);
  const auto report = score_and_evaluate(manifest, ScoringOptions{}, Engine::kAverage,
                                         resolve_workers(0));
  if (!report.median_lcc || !report.global_lcc) return fail("correlations undefined");
  const std::string d = "median LCC " + fmt("%.4f", *report.median_lcc) + " SROCC " +
                        fmt("%.4f", *report.median_srocc) + ", global LCC " +
                        fmt("%.4f", *report.global_lcc) + " SROCC " +
                        fmt("%.4f", *report.global_srocc);
  const bool ok = *report.median_lcc >= 0.95 && *report.median_srocc >= 0.90 &&
                  *report.global_lcc >= 0.85 && *report.global_srocc >= 0.80;
  return ok ? pass(d) : fail(d);
}

fs::path phone_photo() {
  const fs::path path = work_dir() / "phone_1840x3264.png";
  if (fs::exists(path)) return path;
  // A text page of the phone resolution, blurred slightly, stored as RGB.
  const GrayImage page = gaussian_blur(make_test_page(1840, 3264, 42), BlurSpec{1.0});
  std::vector<std::uint8_t> rgb(page.size() * 3);
  for (std::size_t i = 0; i < page.size(); ++i) {
    const std::uint8_t v = page.pixels()[i];
    rgb[3 * i] = v;
    rgb[3 * i + 1] = static_cast<std::uint8_t>(std::max(0, v - 6));
    rgb[3 * i + 2] = static_cast<std::uint8_t>(std::max(0, v - 12));
  }
  fixtures::write_png(path, 1840, 3264, 3, rgb);
  return path;
}

// 8. One 1840x3264 image < 2 s; 175 images, 8 workers < 60 s.
Verdict performance() {
  const fs::path img = phone_photo();
  const auto t0 = Clock::now();
  const auto s = score_document(img, MserParams{});
  const double single = seconds_since(t0);
  if (s.degenerate) return fail("phone-sized page produced no patches");
  const std::vector<std::string> batch(175, img.string());
  const auto t1 = Clock::now();
  const auto items = score_batch(batch, ScoringOptions{}, 8);
  const double total = seconds_since(t1);
  for (const auto& it : items) {
    if (!it.score) return fail("batch item failed: " + it.error);
  }
  const std::string d = "single " + fmt("%.3f s", single) + ", batch of 175 " +
                        fmt("%.2f s", total) + " (" +
                        std::to_string(std::thread::hardware_concurrency()) + " cores)";
  return single < 2.0 && total < 60.0 ? pass(d) : fail(d);
}

// 9. Two eval runs, different worker counts, byte-identical reports.
Verdict determinism() {
  const fs::path dir = work_dir() / "determinism";
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "image_path,doc_id,acc_finereader,acc_tesseract,acc_omnipage\n";
  for (std::uint32_t seed : kPageSeeds) {
    const GrayImage page = make_test_page(kDefaultPageWidth, kDefaultPageHeight, seed + 100);
    for (double sigma : kSigmas) {
      const std::string name = "p" + std::to_string(seed) + "_s" + fmt("%g", sigma) + ".pgm";
      write_pgm(dir / name, gaussian_blur(page, BlurSpec{sigma}));
      const double acc = 0.95 - 0.15 * sigma;
      csv << name << ",doc" << seed << ',' << acc << ',' << acc - 0.05 << ',' << acc - 0.1 << '\n';
    }
  }
  const auto manifest = parse_manifest(csv.str(), dir);
  const std::vector<Engine> engines{Engine::kFineReader, Engine::kTesseract,
                                    Engine::kOmnipage, Engine::kAverage};
  auto serialize = [&](unsigned workers) {
    std::string out;
    for (const auto& r : score_and_evaluate(manifest, ScoringOptions{}, engines, workers)) {
      out += report_to_json(r) + "\n" + report_to_csv(r);
    }
    return out;
  };
  const std::string a = serialize(1);
  const std::string b = serialize(8);
  const std::string c = serialize(3);
  if (a != b || a != c) return fail("reports differ between runs");
  return pass("3 runs (1/8/3 workers) identical, " + std::to_string(a.size()) + " bytes");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 sobel-vs-naive-convolution", sobel_oracle},
      {"2 component-tree-vs-brute-force", tree_oracle},
      {"3 pooled-deviation-vs-enumeration", pool_oracle},
      {"4 correlation-oracles", correlation_oracle},
      {"5 blur-monotonicity", blur_monotonicity},
      {"6 patch-count-trend", patch_trend},
      {"7 diqa-dataset-reproduction", dataset_reproduction},
      {"8 performance", performance},
      {"9 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const char* tag = v.outcome == Outcome::kPass   ? "PASS"
                      : v.outcome == Outcome::kSkip ? "SKIP"
                                                    : "FAIL";
    if (v.outcome == Outcome::kFail) ++failures;
    std::printf("[%s] %s: %s\n", tag, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

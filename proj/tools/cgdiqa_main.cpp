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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cgdiqa/batch.hpp"
#include "cgdiqa/degrade.hpp"
#include "cgdiqa/eval.hpp"
#include "cgdiqa/imgio.hpp"
#include "cgdiqa/mser.hpp"
#include "cgdiqa/scoring.hpp"

namespace fs = std::filesystem;
using namespace cgdiqa;

namespace {

constexpr int kExitFailure = 2;

struct CommonFlags {
  MserParams mser;
  std::string polarity = "dark-on-light";
  int downsample_limit = kDefaultDownsampleLimit;
  std::string format = "json";
  int workers = 0;

  ScoringOptions options() const {
    ScoringOptions opts{mser, downsample_limit};
    opts.mser.polarity = *parse_polarity(polarity);
    return opts;
  }
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--delta", f.mser.delta, "MSER stability offset in gray levels")
      ->capture_default_str();
  cmd->add_option("--v-max", f.mser.max_variation, "maximal variation")
      ->capture_default_str();
  cmd->add_option("--min-area", f.mser.min_area, "minimal region area in pixels")
      ->capture_default_str();
  cmd->add_option("--max-area-frac", f.mser.max_area_fraction,
                  "maximal region area as a fraction of image pixels")
      ->capture_default_str();
  cmd->add_option("--min-aspect", f.mser.min_aspect, "minimal width/height")
      ->capture_default_str();
  cmd->add_option("--max-aspect", f.mser.max_aspect, "maximal width/height")
      ->capture_default_str();
  cmd->add_option("--polarity", f.polarity)
      ->check(CLI::IsMember({"dark-on-light", "light-on-dark", "both"}))
      ->capture_default_str();
  cmd->add_option("--downsample-limit", f.downsample_limit)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--format", f.format)
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--workers", f.workers, "worker threads, 0 = auto")
      ->envname("CGDIQA_WORKERS")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string score_csv_row(const std::string& path, const QualityScore& s) {
  std::ostringstream out;
  out.precision(17);
  out << csv_quote(path) << ',' << s.value << ',' << s.patch_count << ','
      << s.pixel_count << ',' << s.mean_gradient << ','
      << (s.degenerate ? "true" : "false");
  return out.str();
}

int cmd_score(const std::vector<std::string>& paths, const CommonFlags& flags,
              const std::string& dump_dir) {
  const ScoringOptions opts = flags.options();
  std::mutex dump_mutex;
  std::vector<std::string> dump_errors(paths.size());
  std::function<void(std::size_t, const ImageScore&)> dump;
  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    dump = [&](std::size_t i, const ImageScore& r) {
      const std::string stem = fs::path(paths[i]).stem().string();
      const fs::path base = fs::path(dump_dir) / stem;
      try {
        std::ofstream csv(base.string() + "_patches.csv");
        csv << patches_to_csv(r.patches);
        write_pgm(base.string() + "_patches.pgm",
                  draw_patches(r.preprocessed, r.patches));
      } catch (const std::exception& e) {
        std::lock_guard lock(dump_mutex);
        dump_errors[i] = e.what();
      }
    };
  }
  const auto items =
      score_batch(paths, opts, resolve_workers(flags.workers), dump);

  int status = 0;
  if (flags.format == "csv") {
    std::cout << "path,score,patch_count,pixel_count,mean_gradient,degenerate\n";
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    if (!item.score) {
      std::cerr << "error: " << item.path << ": " << item.error << '\n';
      status = kExitFailure;
      continue;
    }
    if (!dump_errors[i].empty()) {
      std::cerr << "warning: patch dump for " << item.path << ": "
                << dump_errors[i] << '\n';
    }
    if (flags.format == "csv") {
      std::cout << score_csv_row(item.path, *item.score) << '\n';
    } else {
      std::cout << score_to_json(item.path, *item.score) << '\n';
    }
  }
  return status;
}

int cmd_eval(const std::string& manifest_path, const std::string& engine_name,
             const CommonFlags& flags) {
  DatasetManifest manifest;
  try {
    manifest = load_manifest(manifest_path);
  } catch (const Error& e) {
    std::cerr << "error: " << manifest_path << ": " << e.what() << '\n';
    return kExitFailure;
  }
  std::vector<Engine> engines;
  if (engine_name == "all") {
    engines = {Engine::kFineReader, Engine::kTesseract, Engine::kOmnipage,
               Engine::kAverage};
  } else {
    engines = {*parse_engine(engine_name)};
  }
  std::vector<EvalReport> reports;
  try {
    reports = score_and_evaluate(manifest, flags.options(), engines,
                                 resolve_workers(flags.workers));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  if (flags.format == "csv") {
    bool first = true;
    for (const auto& r : reports) {
      std::string text = report_to_csv(r);
      if (!first) text.erase(0, text.find('\n') + 1);
      std::cout << text;
      first = false;
    }
  } else {
    for (const auto& r : reports) std::cout << report_to_json(r) << '\n';
  }
  return 0;
}

std::string sigma_label(double sigma) {
  std::ostringstream out;
  out << sigma;
  return out.str();
}

int cmd_degrade(const std::string& input, const std::vector<double>& sigmas,
                const std::string& out_dir) {
  GrayImage img;
  try {
    img = load_image(input);
  } catch (const Error& e) {
    std::cerr << "error: " << input << ": " << e.what() << '\n';
    return kExitFailure;
  }
  const fs::path dir = out_dir.empty() ? fs::path(input).parent_path()
                                       : fs::path(out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  const std::string stem = fs::path(input).stem().string();
  for (double sigma : sigmas) {
    const fs::path out = dir / (stem + "_sigma" + sigma_label(sigma) + ".pgm");
    write_pgm(out, gaussian_blur(img, BlurSpec{sigma}));
    std::cout << out.string() << '\n';
  }
  return 0;
}

int cmd_gen_fixture(const std::string& out_dir, int docs,
                    const std::vector<double>& sigmas, int width, int height,
                    unsigned seed) {
  fs::create_directories(out_dir);
  double max_sigma = 0.0;
  for (double s : sigmas) max_sigma = std::max(max_sigma, s);
  std::ofstream manifest(fs::path(out_dir) / "manifest.csv");
  manifest << "image_path,doc_id,acc_finereader,acc_tesseract,acc_omnipage\n";
  manifest.precision(17);
  for (int d = 0; d < docs; ++d) {
    const std::string doc = "doc" + std::to_string(d + 1);
    const GrayImage page = make_test_page(width, height, seed + d);
    for (double sigma : sigmas) {
      const std::string name = doc + "_sigma" + sigma_label(sigma) + ".pgm";
      write_pgm(fs::path(out_dir) / name, gaussian_blur(page, BlurSpec{sigma}));
      // Accuracy proxy falls linearly with blur.
      const double proxy = max_sigma > 0 ? 1.0 - sigma / (max_sigma + 1.0) : 1.0;
      manifest << name << ',' << doc << ',' << proxy << ',' << proxy * 0.9
               << ',' << proxy * 0.8 << '\n';
    }
  }
  std::cout << (fs::path(out_dir) / "manifest.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Document image quality scoring from character gradients"};
  app.require_subcommand(1);

  CommonFlags score_flags;
  std::vector<std::string> score_paths;
  std::string dump_dir;
  auto* score = app.add_subcommand("score", "score document images");
  add_common_flags(score, score_flags);
  score->add_option("paths", score_paths, "PGM or PNG images")->required();
  score->add_option("--dump-patches", dump_dir,
                    "write <stem>_patches.csv and <stem>_patches.pgm here");

  CommonFlags eval_flags;
  std::string manifest_path;
  std::string engine = "average";
  auto* eval = app.add_subcommand("eval", "evaluate scores against a manifest");
  add_common_flags(eval, eval_flags);
  eval->add_option("manifest", manifest_path, "manifest CSV")->required();
  eval->add_option("--engine", engine)
      ->check(CLI::IsMember(
          {"finereader", "tesseract", "omnipage", "average", "all"}))
      ->capture_default_str();

  std::string degrade_input;
  std::vector<double> degrade_sigmas{1.0, 2.0, 4.0};
  std::string degrade_out;
  auto* degrade = app.add_subcommand("degrade", "write Gaussian-blurred copies");
  degrade->add_option("input", degrade_input)->required();
  degrade->add_option("--sigma", degrade_sigmas, "blur sigmas")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  degrade->add_option("--out-dir", degrade_out, "defaults to the input's directory");

  std::string fixture_dir;
  int fixture_docs = 3;
  std::vector<double> fixture_sigmas{0.0, 1.0, 2.0, 4.0};
  int fixture_w = kDefaultPageWidth;
  int fixture_h = kDefaultPageHeight;
  unsigned fixture_seed = 1;
  auto* fixture = app.add_subcommand(
      "gen-fixture", "write synthetic pages at several blur levels plus a manifest");
  fixture->add_option("out_dir", fixture_dir)->required();
  fixture->add_option("--docs", fixture_docs)->check(CLI::PositiveNumber)
      ->capture_default_str();
  fixture->add_option("--sigma", fixture_sigmas)
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fixture->add_option("--width", fixture_w)->check(CLI::Range(64, 20000))
      ->capture_default_str();
  fixture->add_option("--height", fixture_h)->check(CLI::Range(64, 20000))
      ->capture_default_str();
  fixture->add_option("--seed", fixture_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFailure;
  }

  try {
    if (*score || *eval) {
      const CommonFlags& flags = *score ? score_flags : eval_flags;
      try {
        flags.options().mser.validate();
      } catch (const ContractError& e) {
        std::cerr << "error: invalid MSER parameters: " << e.what() << '\n';
        return kExitFailure;
      }
      if (*score) return cmd_score(score_paths, flags, dump_dir);
      return cmd_eval(manifest_path, engine, flags);
    }
    if (*degrade) return cmd_degrade(degrade_input, degrade_sigmas, degrade_out);
    if (*fixture) {
      return cmd_gen_fixture(fixture_dir, fixture_docs, fixture_sigmas,
                             fixture_w, fixture_h, fixture_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

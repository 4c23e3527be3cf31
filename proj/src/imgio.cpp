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

#include "cgdiqa/imgio.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace cgdiqa {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failed for " + path.string());
  }
  return bytes;
}

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Cursor over the ASCII part of a PNM header.
class PnmHeaderReader {
 public:
  PnmHeaderReader(std::span<const std::uint8_t> bytes, std::size_t pos)
      : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) {
        throw FormatError(std::string("PGM ") + what + " too large", start);
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw FormatError(std::string("PGM ") + what + " missing", start);
    }
    return value;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t count) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + count > state->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, state->bytes.data() + state->pos, count);
  state->pos += count;
}

[[noreturn]] void png_throw(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  throw FormatError(std::string("PNG: ") + msg, state ? state->pos : 0);
}

void png_warn(png_structp, png_const_charp) {}

// RAII owner of the libpng read structs.
class PngReader {
 public:
  PngReader() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw,
                                  png_warn);
    if (png_ == nullptr) throw Error("png_create_read_struct failed");
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw Error("png_create_info_struct failed");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G',
                                           '\r', '\n', 0x1a, '\n'};

}  // namespace

std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g,
                        std::uint8_t b) noexcept {
  // Integer form of 0.299/0.587/0.114 sidesteps binary rounding at .5 ties.
  const int weighted = 299 * r + 587 * g + 114 * b;
  const int y = (weighted + 500) / 1000;
  return static_cast<std::uint8_t>(std::clamp(y, 0, 255));
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (expected P5 magic)", 0);
  }
  PnmHeaderReader reader(bytes, 2);
  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  reader.skip_space_and_comments();
  const std::size_t maxval_pos = reader.pos();
  const long maxval = reader.read_uint("maxval");
  if (width <= 0 || height <= 0) {
    throw FormatError("PGM dimensions must be positive", 2);
  }
  if (maxval != 255) {
    throw FormatError("PGM maxval must be 255", maxval_pos);
  }
  std::size_t raster = reader.pos();
  if (raster >= bytes.size() || !is_space(bytes[raster])) {
    throw FormatError("PGM header not terminated by whitespace", raster);
  }
  ++raster;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - raster < count) {
    throw FormatError("PGM raster truncated", bytes.size());
  }
  std::vector<std::uint8_t> data(bytes.begin() + raster,
                                 bytes.begin() + raster + count);
  return GrayImage(static_cast<int>(width), static_cast<int>(height),
                   std::move(data));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || !std::equal(bytes.begin(), bytes.begin() + 8,
                                      std::begin(kPngSignature))) {
    throw FormatError("not a PNG (bad signature)", 0);
  }
  PngReadState state{bytes, 0};
  PngReader reader;
  png_structp png = reader.png();
  png_infop info = reader.info();
  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if ((color & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    throw FormatError("unsupported PNG channel layout", state.pos);
  }
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> raw(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = raw.data() + y * row_bytes;
  }
  png_read_image(png, rows.data());

  GrayImage img(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      img(static_cast<int>(x), static_cast<int>(y)) =
          channels == 1 ? row[x]
                        : luma_bt601(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
    }
  }
  return img;
}

GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    return decode_pgm(bytes);
  }
  if (bytes.size() >= 8 && std::equal(bytes.begin(), bytes.begin() + 8,
                                      std::begin(kPngSignature))) {
    return decode_png(bytes);
  }
  throw FormatError("unsupported image format in " + path.string(), 0);
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

GrayImage downsample_if_large(const GrayImage& img, int limit) {
  if (limit <= 0) {
    throw ContractError("downsample limit must be positive");
  }
  const int w = img.width();
  const int h = img.height();
  if (w <= limit && h <= limit) {
    return img;
  }
  const double f = static_cast<double>(limit) / std::max(w, h);
  const int out_w = std::max(1, static_cast<int>(std::lround(w * f)));
  const int out_h = std::max(1, static_cast<int>(std::lround(h * f)));
  const double sx = static_cast<double>(w) / out_w;
  const double sy = static_cast<double>(h) / out_h;

  // Horizontal taps are shared by every output row.
  struct Tap {
    int i0, i1;
    double t;
  };
  auto make_taps = [](int out_n, int in_n, double scale) {
    std::vector<Tap> taps(out_n);
    for (int o = 0; o < out_n; ++o) {
      double src = (o + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in_n - 1));
      const int i0 = static_cast<int>(src);
      const int i1 = std::min(i0 + 1, in_n - 1);
      taps[o] = {i0, i1, src - i0};
    }
    return taps;
  };
  const auto xt = make_taps(out_w, w, sx);
  const auto yt = make_taps(out_h, h, sy);

  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const auto [y0, y1, ty] = yt[y];
    for (int x = 0; x < out_w; ++x) {
      const auto [x0, x1, tx] = xt[x];
      const double top = img(x0, y0) + tx * (img(x1, y0) - img(x0, y0));
      const double bot = img(x0, y1) + tx * (img(x1, y1) - img(x0, y1));
      const double v = top + ty * (bot - top);
      out(x, y) = static_cast<std::uint8_t>(
          std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

}  // namespace cgdiqa

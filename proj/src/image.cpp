// Copyright 2026 The aidcov Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "error.hpp"

namespace aidcov {

namespace fs = std::filesystem;

GrayImage::GrayImage(Matrix pixels) : pixels_(std::move(pixels)) {
  require(pixels_.rows() >= kMinImageSide && pixels_.cols() >= kMinImageSide,
          ErrorCode::kInvalidArgument,
          "GrayImage: dimensions must be at least 8x8, got " + std::to_string(pixels_.rows()) +
              "x" + std::to_string(pixels_.cols()));
  require(pixels_.allFinite(), ErrorCode::kInvalidArgument, "GrayImage: non-finite pixel");
  require(pixels_.minCoeff() >= 0.0 && pixels_.maxCoeff() <= 1.0, ErrorCode::kInvalidArgument,
          "GrayImage: pixel values must lie in [0, 1]");
}

Matrix resize_bilinear(const Matrix& src, Index out_h, Index out_w) {
  require(out_h >= 1 && out_w >= 1 && src.size() > 0, ErrorCode::kInvalidArgument,
          "resize_bilinear: empty size");
  const Index in_h = src.rows();
  const Index in_w = src.cols();
  auto scale = [](Index in, Index out) {
    return out > 1 ? static_cast<double>(in - 1) / static_cast<double>(out - 1) : 0.0;
  };
  const double sy = scale(in_h, out_h);
  const double sx = scale(in_w, out_w);
  Matrix dst(out_h, out_w);
  for (Index i = 0; i < out_h; ++i) {
    const double fy = static_cast<double>(i) * sy;
    const Index y0 = std::min(static_cast<Index>(std::floor(fy)), in_h - 1);
    const Index y1 = std::min(y0 + 1, in_h - 1);
    const double ty = fy - static_cast<double>(y0);
    for (Index j = 0; j < out_w; ++j) {
      const double fx = static_cast<double>(j) * sx;
      const Index x0 = std::min(static_cast<Index>(std::floor(fx)), in_w - 1);
      const Index x1 = std::min(x0 + 1, in_w - 1);
      const double tx = fx - static_cast<double>(x0);
      const double top = (1.0 - tx) * src(y0, x0) + tx * src(y0, x1);
      const double bottom = (1.0 - tx) * src(y1, x0) + tx * src(y1, x1);
      dst(i, j) = (1.0 - ty) * top + ty * bottom;
    }
  }
  return dst;
}

namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  fail(ErrorCode::kIo, path.string() + ": " + what);
}

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string pnm_token(std::istream& in, const fs::path& path) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(c);
  }
  if (tok.empty()) io_fail(path, "truncated PGM header");
  return tok;
}

long pnm_number(std::istream& in, const fs::path& path) {
  const std::string tok = pnm_token(in, path);
  try {
    std::size_t used = 0;
    long v = std::stol(tok, &used);
    if (used != tok.size() || v < 0) io_fail(path, "bad PGM header value '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    io_fail(path, "bad PGM header value '" + tok + "'");
  }
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open");
  const std::string magic = pnm_token(in, path);
  if (magic != "P5" && magic != "P2") io_fail(path, "not a P2/P5 PGM file");
  const long w = pnm_number(in, path);
  const long h = pnm_number(in, path);
  const long maxval = pnm_number(in, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) io_fail(path, "invalid PGM header");
  Matrix px(h, w);
  if (magic == "P2") {
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        const long v = pnm_number(in, path);
        if (v > maxval) io_fail(path, "pixel exceeds maxval");
        px(y, x) = static_cast<double>(v) / static_cast<double>(maxval);
      }
    }
  } else {
    // The single whitespace after maxval was consumed by pnm_token.
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w * h * bytes));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      io_fail(path, "truncated PGM pixel data");
    }
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        const std::size_t k = static_cast<std::size_t>((y * w + x) * bytes);
        const long v = bytes == 1 ? buf[k] : (static_cast<long>(buf[k]) << 8) | buf[k + 1];
        if (v > maxval) io_fail(path, "pixel exceeds maxval");
        px(y, x) = static_cast<double>(v) / static_cast<double>(maxval);
      }
    }
  }
  try {
    return GrayImage(std::move(px));
  } catch (const Error& e) {
    io_fail(path, e.what());
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

GrayImage read_png(const fs::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) io_fail(path, "cannot open");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    io_fail(path, "not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) io_fail(path, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    io_fail(path, "libpng initialisation failed");
  }
  std::vector<unsigned char> data;
  std::vector<png_bytep> rows;
  png_uint_32 w = 0, h = 0;
  int bit_depth = 0, color_type = 0;
  // libpng reports errors through longjmp; everything with a destructor is
  // declared above this point.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_fail(path, "corrupt PNG data");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
  const bool gray = color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA;
  if (!gray || bit_depth > 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_fail(path, "only 8-bit grayscale PNG is supported");
  }
  if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  data.resize(static_cast<std::size_t>(w) * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * w;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Matrix px(h, w);
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      px(y, x) = static_cast<double>(data[static_cast<std::size_t>(y) * w + x]) / 255.0;
    }
  }
  try {
    return GrayImage(std::move(px));
  } catch (const Error& e) {
    io_fail(path, e.what());
  }
}

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

bool is_image_file(const fs::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".pgm" || ext == ".png";
}

GrayImage read_image(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  io_fail(path, "unsupported image extension (expected .pgm or .png)");
}

void write_pgm(const GrayImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> buf(static_cast<std::size_t>(img.width() * img.height()));
  for (Index y = 0; y < img.height(); ++y) {
    for (Index x = 0; x < img.width(); ++x) {
      buf[static_cast<std::size_t>(y * img.width() + x)] =
          static_cast<unsigned char>(std::lround(img.at(y, x) * 255.0));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) io_fail(path, "write failed");
}

}  // namespace aidcov

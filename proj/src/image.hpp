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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spd.hpp"

namespace aidcov {

inline constexpr Index kMinImageSide = 8;

// Grayscale image, pixels(row = y, col = x), values in [0, 1].
class GrayImage {
 public:
  explicit GrayImage(Matrix pixels);

  Index height() const { return pixels_.rows(); }
  Index width() const { return pixels_.cols(); }
  const Matrix& pixels() const { return pixels_; }
  double at(Index y, Index x) const { return pixels_(y, x); }

 private:
  Matrix pixels_;
};

struct ImageSet {
  std::string label;
  std::string id;  // stable identifier, e.g. "class/set"
  std::vector<GrayImage> images;
};

// Bilinear resize with corner-aligned sampling: output (i, j) samples the
// source at (i * (H-1)/(h-1), j * (W-1)/(w-1)).
Matrix resize_bilinear(const Matrix& src, Index out_h, Index out_w);

// PGM (P2 / P5, 8 or 16 bit) and 8-bit grayscale PNG.
GrayImage read_image(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

bool is_image_file(const std::filesystem::path& path);

}  // namespace aidcov

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

#include <json.hpp>
#include <string>
#include <vector>

#include "image.hpp"
#include "spd.hpp"

namespace aidcov {

enum class FeatureKind { kGabor, kGradient, kGaborPlusGradient };

const char* feature_kind_name(FeatureKind k);
FeatureKind parse_feature_kind(const std::string& name);

inline constexpr Index kGradientRows = 5;
// Images with more pixels than this are subsampled with stride 2 when the
// stride is left on automatic.
inline constexpr Index kAutoStridePixelLimit = 10000;

struct FeatureSpec {
  FeatureKind kind = FeatureKind::kGaborPlusGradient;
  int scales = 5;
  int orientations = 8;
  double base_wavelength = 4.0;  // pixels
  double wavelength_ratio = 1.4142135623730951;
  double sigma_ratio = 0.56;     // sigma = sigma_ratio * wavelength
  double support_sigmas = 2.5;   // kernel radius = ceil(support_sigmas * sigma)
  int stride = 0;                // 0 = automatic

  void validate() const;
  bool uses_gabor() const { return kind != FeatureKind::kGradient; }
  Index feature_dim() const;
  int effective_stride(Index height, Index width) const;

  bool operator==(const FeatureSpec&) const = default;
};

void to_json(nlohmann::json& j, const FeatureSpec& s);
void from_json(const nlohmann::json& j, FeatureSpec& s);

// d x p, one column per sampled pixel.
struct FeatureMatrix {
  Matrix data;

  Index d() const { return data.rows(); }
  Index p() const { return data.cols(); }
};

// Complex Gabor filter bank. Kernels are zero-mean and normalised by the
// envelope mass; rows of the output are ordered scale-major.
class GaborBank {
 public:
  explicit GaborBank(const FeatureSpec& spec);

  int size() const { return static_cast<int>(kernels_.size()); }
  Index max_radius() const { return max_radius_; }

  // Magnitude responses on the sampled pixel grid, one row per filter.
  Matrix responses(const GrayImage& img, int stride) const;

 private:
  struct Kernel {
    Index radius;
    std::vector<double> re;
    std::vector<double> im;
  };
  std::vector<Kernel> kernels_;
  Index max_radius_ = 0;
};

FeatureMatrix gabor_features(const GrayImage& img, const FeatureSpec& spec);
FeatureMatrix gradient_features(const GrayImage& img, int stride = 1);
// Dispatches on spec.kind.
FeatureMatrix extract_features(const GrayImage& img, const FeatureSpec& spec);

// Reuses one filter bank across many images.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureSpec spec);
  FeatureMatrix operator()(const GrayImage& img) const;
  const FeatureSpec& spec() const { return spec_; }

 private:
  FeatureSpec spec_;
  std::vector<GaborBank> bank_;  // empty for GRADIENT
};

// p^{-3/2} (p I - 1 1^T)
Matrix centering_matrix(Index p);

// (1/p) sum_i (f_i - mean)(f_i - mean)^T, unregularised.
Matrix feature_covariance(const Matrix& features);

SpdMatrix covd_of_features(const FeatureMatrix& f, double eps);

// Column-major vectorisation of each resized image; returns the
// (h*w) x N matrix of image vectors.
Matrix vectorize_set(const ImageSet& set, Index h, Index w);

SpdMatrix traditional_set_covd(const ImageSet& set, Index h, Index w, double eps);

}  // namespace aidcov

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

#include "features.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace aidcov {

const char* feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::kGabor: return "GABOR";
    case FeatureKind::kGradient: return "GRADIENT";
    case FeatureKind::kGaborPlusGradient: return "GABOR_PLUS_GRADIENT";
  }
  return "?";
}

FeatureKind parse_feature_kind(const std::string& name) {
  for (FeatureKind k :
       {FeatureKind::kGabor, FeatureKind::kGradient, FeatureKind::kGaborPlusGradient}) {
    if (name == feature_kind_name(k)) return k;
  }
  fail(ErrorCode::kConfig, "unknown feature kind '" + name + "'");
}

void FeatureSpec::validate() const {
  require(scales >= 1 && orientations >= 1, ErrorCode::kInvalidArgument,
          "feature spec: scales and orientations must be positive");
  require(base_wavelength > 0.0 && wavelength_ratio > 0.0 && sigma_ratio > 0.0 &&
              support_sigmas > 0.0,
          ErrorCode::kInvalidArgument, "feature spec: Gabor parameters must be positive");
  require(stride >= 0, ErrorCode::kInvalidArgument, "feature spec: stride must be >= 0");
}

Index FeatureSpec::feature_dim() const {
  switch (kind) {
    case FeatureKind::kGabor: return static_cast<Index>(scales) * orientations;
    case FeatureKind::kGradient: return kGradientRows;
    case FeatureKind::kGaborPlusGradient:
      return static_cast<Index>(scales) * orientations + kGradientRows;
  }
  return 0;
}

int FeatureSpec::effective_stride(Index height, Index width) const {
  if (stride > 0) return stride;
  return height * width > kAutoStridePixelLimit ? 2 : 1;
}

void to_json(nlohmann::json& j, const FeatureSpec& s) {
  j = nlohmann::json{{"kind", feature_kind_name(s.kind)},
                     {"scales", s.scales},
                     {"orientations", s.orientations},
                     {"base_wavelength", s.base_wavelength},
                     {"wavelength_ratio", s.wavelength_ratio},
                     {"sigma_ratio", s.sigma_ratio},
                     {"support_sigmas", s.support_sigmas},
                     {"stride", s.stride}};
}

void from_json(const nlohmann::json& j, FeatureSpec& s) {
  s = FeatureSpec{};
  s.kind = parse_feature_kind(j.value("kind", std::string(feature_kind_name(s.kind))));
  s.scales = j.value("scales", s.scales);
  s.orientations = j.value("orientations", s.orientations);
  s.base_wavelength = j.value("base_wavelength", s.base_wavelength);
  s.wavelength_ratio = j.value("wavelength_ratio", s.wavelength_ratio);
  s.sigma_ratio = j.value("sigma_ratio", s.sigma_ratio);
  s.support_sigmas = j.value("support_sigmas", s.support_sigmas);
  s.stride = j.value("stride", s.stride);
}

GaborBank::GaborBank(const FeatureSpec& spec) {
  spec.validate();
  for (int s = 0; s < spec.scales; ++s) {
    const double wavelength = spec.base_wavelength * std::pow(spec.wavelength_ratio, s);
    const double sigma = spec.sigma_ratio * wavelength;
    const Index radius = static_cast<Index>(std::ceil(spec.support_sigmas * sigma));
    max_radius_ = std::max(max_radius_, radius);
    const Index width = 2 * radius + 1;
    for (int o = 0; o < spec.orientations; ++o) {
      const double theta = std::numbers::pi * o / spec.orientations;
      const double c = std::cos(theta);
      const double sn = std::sin(theta);
      Kernel k{radius, std::vector<double>(width * width), std::vector<double>(width * width)};
      std::vector<double> env(width * width);
      double mass = 0.0, dc_re = 0.0, dc_im = 0.0;
      for (Index v = -radius; v <= radius; ++v) {
        for (Index u = -radius; u <= radius; ++u) {
          const std::size_t idx = static_cast<std::size_t>((v + radius) * width + (u + radius));
          const double e = std::exp(-static_cast<double>(u * u + v * v) / (2.0 * sigma * sigma));
          const double phase = 2.0 * std::numbers::pi * (u * c + v * sn) / wavelength;
          env[idx] = e;
          k.re[idx] = std::cos(phase);
          k.im[idx] = std::sin(phase);
          mass += e;
          dc_re += e * k.re[idx];
          dc_im += e * k.im[idx];
        }
      }
      dc_re /= mass;
      dc_im /= mass;
      for (std::size_t idx = 0; idx < env.size(); ++idx) {
        k.re[idx] = env[idx] * (k.re[idx] - dc_re) / mass;
        k.im[idx] = env[idx] * (k.im[idx] - dc_im) / mass;
      }
      kernels_.push_back(std::move(k));
    }
  }
}

Matrix GaborBank::responses(const GrayImage& img, int stride) const {
  const Index h = img.height();
  const Index w = img.width();
  require(max_radius_ < std::min(h, w), ErrorCode::kInvalidArgument,
          "gabor_features: image " + std::to_string(h) + "x" + std::to_string(w) +
              " is smaller than the largest filter support (radius " +
              std::to_string(max_radius_) + ")");
  // Replicated border.
  const Index pad = max_radius_;
  const Index pw = w + 2 * pad;
  const Index ph = h + 2 * pad;
  std::vector<double> padded(static_cast<std::size_t>(pw * ph));
  for (Index y = 0; y < ph; ++y) {
    const Index sy = std::clamp<Index>(y - pad, 0, h - 1);
    for (Index x = 0; x < pw; ++x) {
      const Index sx = std::clamp<Index>(x - pad, 0, w - 1);
      padded[static_cast<std::size_t>(y * pw + x)] = img.at(sy, sx);
    }
  }
  const Index rows_out = (h + stride - 1) / stride;
  const Index cols_out = (w + stride - 1) / stride;
  Matrix out(static_cast<Index>(kernels_.size()), rows_out * cols_out);
  for (std::size_t f = 0; f < kernels_.size(); ++f) {
    const Kernel& k = kernels_[f];
    const Index r = k.radius;
    const Index kw = 2 * r + 1;
    Index col = 0;
    for (Index y = 0; y < h; y += stride) {
      for (Index x = 0; x < w; x += stride, ++col) {
        double acc_re = 0.0, acc_im = 0.0;
        for (Index v = 0; v < kw; ++v) {
          const double* row = &padded[static_cast<std::size_t>((y + pad - r + v) * pw +
                                                               (x + pad - r))];
          const double* kre = &k.re[static_cast<std::size_t>(v * kw)];
          const double* kim = &k.im[static_cast<std::size_t>(v * kw)];
          for (Index u = 0; u < kw; ++u) {
            acc_re += kre[u] * row[u];
            acc_im += kim[u] * row[u];
          }
        }
        out(static_cast<Index>(f), col) = std::hypot(acc_re, acc_im);
      }
    }
  }
  return out;
}

FeatureMatrix gradient_features(const GrayImage& img, int stride) {
  require(stride >= 1, ErrorCode::kInvalidArgument, "gradient_features: stride must be >= 1");
  const Index h = img.height();
  const Index w = img.width();
  const Index rows_out = (h + stride - 1) / stride;
  const Index cols_out = (w + stride - 1) / stride;
  FeatureMatrix f{Matrix(kGradientRows, rows_out * cols_out)};
  Index col = 0;
  for (Index y = 0; y < h; y += stride) {
    for (Index x = 0; x < w; x += stride, ++col) {
      const double dx = 0.5 * (img.at(y, std::min(x + 1, w - 1)) - img.at(y, std::max<Index>(x - 1, 0)));
      const double dy = 0.5 * (img.at(std::min(y + 1, h - 1), x) - img.at(std::max<Index>(y - 1, 0), x));
      f.data(0, col) = static_cast<double>(x) / static_cast<double>(w);
      f.data(1, col) = static_cast<double>(y) / static_cast<double>(h);
      f.data(2, col) = img.at(y, x);
      f.data(3, col) = std::abs(dx);
      f.data(4, col) = std::abs(dy);
    }
  }
  return f;
}

FeatureExtractor::FeatureExtractor(FeatureSpec spec) : spec_(spec) {
  spec_.validate();
  if (spec_.uses_gabor()) bank_.emplace_back(spec_);
}

FeatureMatrix FeatureExtractor::operator()(const GrayImage& img) const {
  const int stride = spec_.effective_stride(img.height(), img.width());
  if (spec_.kind == FeatureKind::kGradient) return gradient_features(img, stride);
  Matrix gabor = bank_.front().responses(img, stride);
  if (spec_.kind == FeatureKind::kGabor) return FeatureMatrix{std::move(gabor)};
  FeatureMatrix grad = gradient_features(img, stride);
  FeatureMatrix out{Matrix(gabor.rows() + grad.d(), gabor.cols())};
  out.data.topRows(gabor.rows()) = gabor;
  out.data.bottomRows(grad.d()) = grad.data;
  return out;
}

FeatureMatrix gabor_features(const GrayImage& img, const FeatureSpec& spec) {
  require(spec.uses_gabor(), ErrorCode::kInvalidArgument,
          "gabor_features: feature kind does not include GABOR");
  return FeatureExtractor(spec)(img);
}

FeatureMatrix extract_features(const GrayImage& img, const FeatureSpec& spec) {
  return FeatureExtractor(spec)(img);
}

Matrix centering_matrix(Index p) {
  require(p >= 1, ErrorCode::kInvalidArgument, "centering_matrix: p must be >= 1");
  const double pd = static_cast<double>(p);
  Matrix j = Matrix::Constant(p, p, -1.0);
  j.diagonal().array() += pd;
  return std::pow(pd, -1.5) * j;
}

Matrix feature_covariance(const Matrix& features) {
  require(features.cols() >= 1, ErrorCode::kInvalidArgument,
          "covariance: need at least one sample");
  require(features.allFinite(), ErrorCode::kInvalidArgument,
          "covariance: feature matrix has non-finite entries");
  // Shift by the first sample before centring: exact zero for constant
  // columns and less cancellation for data far from the origin.
  const Matrix shifted = features.colwise() - features.col(0);
  const Vector mean = shifted.rowwise().mean();
  const Matrix centered = shifted.colwise() - mean;
  Matrix c = centered * centered.transpose() / static_cast<double>(features.cols());
  return 0.5 * (c + c.transpose());
}

SpdMatrix covd_of_features(const FeatureMatrix& f, double eps) {
  return make_spd(feature_covariance(f.data), eps);
}

Matrix vectorize_set(const ImageSet& set, Index h, Index w) {
  require(!set.images.empty(), ErrorCode::kInvalidArgument,
          "traditional_set_covd: empty image set");
  require(h >= 1 && w >= 1, ErrorCode::kInvalidArgument, "resize dimensions must be positive");
  Matrix s(h * w, static_cast<Index>(set.images.size()));
  for (std::size_t i = 0; i < set.images.size(); ++i) {
    const Matrix r = resize_bilinear(set.images[i].pixels(), h, w);
    // Eigen storage is column-major, so this is the column-major vectorisation.
    s.col(static_cast<Index>(i)) = r.reshaped();
  }
  return s;
}

SpdMatrix traditional_set_covd(const ImageSet& set, Index h, Index w, double eps) {
  return make_spd(feature_covariance(vectorize_set(set, h, w)), eps);
}

}  // namespace aidcov

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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "features.hpp"
#include "image.hpp"
#include "test_support.hpp"

using namespace aidcov;
using testing::code;
using testing::error_code_of;

namespace {

GrayImage constant_image(Index h, Index w, double v) {
  return GrayImage(Matrix::Constant(h, w, v));
}

GrayImage random_image(SplitMix64& rng, Index h, Index w) {
  Matrix m(h, w);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return GrayImage(m);
}

FeatureSpec gabor_only() {
  FeatureSpec s;
  s.kind = FeatureKind::kGabor;
  return s;
}

double row_variance(const Matrix& f, Index r) {
  const double mean = f.row(r).mean();
  return (f.row(r).array() - mean).square().mean();
}

}  // namespace

TEST_CASE("GrayImage validation") {
  CHECK(error_code_of([] { GrayImage g(Matrix::Zero(7, 8)); }) ==
        code(ErrorCode::kInvalidArgument));
  CHECK(error_code_of([] { GrayImage g(Matrix::Constant(8, 8, 1.5)); }) ==
        code(ErrorCode::kInvalidArgument));
  CHECK(error_code_of([] { GrayImage g(Matrix::Constant(8, 8, 0.5)); }) == -1);
}

TEST_CASE("gabor_features: dimension is scales x orientations") {
  SplitMix64 rng(41);
  const FeatureMatrix f = gabor_features(random_image(rng, 48, 48), gabor_only());
  CHECK(f.d() == 40);
  CHECK(f.p() == 48 * 48);
  FeatureSpec both;
  CHECK(both.feature_dim() == 45);
  CHECK(extract_features(random_image(rng, 48, 40), both).d() == 45);
  CHECK(f.data.allFinite());
}

TEST_CASE("gabor_features: constant image has zero-variance responses") {
  const FeatureMatrix f = gabor_features(constant_image(40, 40, 0.3), gabor_only());
  for (Index r = 0; r < f.d(); ++r) CHECK(row_variance(f.data, r) <= 1e-20);
  CHECK(f.data.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gabor_features: impulse response is point symmetric") {
  const Index n = 65;
  Matrix px = Matrix::Zero(n, n);
  px(32, 32) = 1.0;
  const FeatureMatrix f = gabor_features(GrayImage(px), gabor_only());
  // Column index is y * n + x; the 180-degree rotation about the impulse maps
  // (y, x) to (64 - y, 64 - x).
  double worst = 0.0;
  for (Index r = 0; r < f.d(); ++r) {
    for (Index y = 0; y < n; ++y) {
      for (Index x = 0; x < n; ++x) {
        worst = std::max(worst, std::abs(f.data(r, y * n + x) -
                                         f.data(r, (n - 1 - y) * n + (n - 1 - x))));
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("gabor_features: orientation theta and theta + pi give identical magnitudes") {
  // Rotating the image by 180 degrees is the same as shifting every filter
  // orientation by pi, so responses on the rotated image, read back in
  // rotated pixel order, must match.
  SplitMix64 rng(42);
  const Index n = 50;
  const GrayImage img = random_image(rng, n, n);
  const GrayImage rot(img.pixels().reverse());
  const FeatureMatrix a = gabor_features(img, gabor_only());
  const FeatureMatrix b = gabor_features(rot, gabor_only());
  double worst = 0.0;
  for (Index r = 0; r < a.d(); ++r) {
    for (Index y = 0; y < n; ++y) {
      for (Index x = 0; x < n; ++x) {
        worst = std::max(worst, std::abs(a.data(r, y * n + x) -
                                          b.data(r, (n - 1 - y) * n + (n - 1 - x))));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("property: Gabor energy is invariant under intensity negation") {
  SplitMix64 rng(43);
  for (int t = 0; t < 3; ++t) {
    const GrayImage img = random_image(rng, 40, 44);
    const GrayImage neg(Matrix::Ones(40, 44) - img.pixels());
    const FeatureMatrix a = gabor_features(img, gabor_only());
    const FeatureMatrix b = gabor_features(neg, gabor_only());
    CHECK((a.data - b.data).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("gabor_features: image smaller than the filter support is rejected") {
  SplitMix64 rng(44);
  // Largest default kernel radius is ceil(2.5 * 0.56 * 16) = 23.
  CHECK(GaborBank(gabor_only()).max_radius() == 23);
  CHECK(error_code_of([&] { gabor_features(random_image(rng, 23, 40), gabor_only()); }) ==
        code(ErrorCode::kInvalidArgument));
  CHECK(error_code_of([&] { gabor_features(random_image(rng, 24, 24), gabor_only()); }) == -1);
  FeatureSpec grad;
  grad.kind = FeatureKind::kGradient;
  CHECK(error_code_of([&] { gabor_features(random_image(rng, 24, 24), grad); }) ==
        code(ErrorCode::kInvalidArgument));
}

TEST_CASE("gradient_features: constant image") {
  const FeatureMatrix f = gradient_features(constant_image(8, 10, 0.7));
  CHECK(f.d() == 5);
  CHECK(f.p() == 80);
  for (Index y = 0; y < 8; ++y) {
    for (Index x = 0; x < 10; ++x) {
      const Index c = y * 10 + x;
      CHECK(f.data(0, c) == static_cast<double>(x) / 10.0);
      CHECK(f.data(1, c) == static_cast<double>(y) / 8.0);
      CHECK(f.data(2, c) == 0.7);
      CHECK(f.data(3, c) == 0.0);
      CHECK(f.data(4, c) == 0.0);
    }
  }
}

TEST_CASE("gradient_features: horizontal ramp has derivative 1/width") {
  const Index h = 9, w = 16;
  Matrix px(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) px(y, x) = static_cast<double>(x) / w;
  }
  const FeatureMatrix f = gradient_features(GrayImage(px));
  for (Index y = 0; y < h; ++y) {
    for (Index x = 1; x + 1 < w; ++x) {
      CHECK(std::abs(f.data(3, y * w + x) - 1.0 / w) <= 1e-10);
      CHECK(f.data(4, y * w + x) == 0.0);
    }
  }
}

TEST_CASE("gradient_features: checkerboard matches a loop oracle exactly") {
  Matrix px(8, 8);
  for (Index y = 0; y < 8; ++y) {
    for (Index x = 0; x < 8; ++x) px(y, x) = ((x + y) % 2 == 0) ? 1.0 : 0.0;
  }
  const FeatureMatrix f = gradient_features(GrayImage(px));
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const int xl = x == 0 ? 0 : x - 1;
      const int xr = x == 7 ? 7 : x + 1;
      const int yu = y == 0 ? 0 : y - 1;
      const int yd = y == 7 ? 7 : y + 1;
      const double dx = std::fabs((px(y, xr) - px(y, xl)) / 2.0);
      const double dy = std::fabs((px(yd, x) - px(yu, x)) / 2.0);
      CHECK(f.data(3, y * 8 + x) == dx);
      CHECK(f.data(4, y * 8 + x) == dy);
    }
  }
}

TEST_CASE("feature stride: automatic above the pixel limit") {
  FeatureSpec s;
  CHECK(s.effective_stride(100, 100) == 1);
  CHECK(s.effective_stride(101, 100) == 2);
  s.stride = 3;
  CHECK(s.effective_stride(101, 100) == 3);
  SplitMix64 rng(45);
  s.kind = FeatureKind::kGradient;
  const FeatureMatrix f = FeatureExtractor(s)(random_image(rng, 10, 11));
  CHECK(f.p() == 4 * 4);
  CHECK(f.d() == 5);
}

TEST_CASE("FeatureSpec validation and JSON") {
  FeatureSpec s;
  s.scales = 0;
  CHECK(error_code_of([&] { s.validate(); }) == code(ErrorCode::kInvalidArgument));
  FeatureSpec t;
  t.kind = FeatureKind::kGradient;
  t.stride = 2;
  const nlohmann::json j = t;
  CHECK(j.get<FeatureSpec>() == t);
  CHECK(j.at("kind") == "GRADIENT");
}

TEST_CASE("centering_matrix: examples") {
  CHECK(centering_matrix(1) == Matrix::Zero(1, 1));
  Matrix want(2, 2);
  want << 1, -1, -1, 1;
  want *= std::pow(2.0, -1.5);
  CHECK((centering_matrix(2) - want).cwiseAbs().maxCoeff() <= 1e-16);
  for (Index p = 1; p <= 20; ++p) {
    const Matrix j = centering_matrix(p);
    CHECK((j * j.transpose() * Vector::Ones(p)).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix jj_want =
        (Matrix::Identity(p, p) - Matrix::Constant(p, p, 1.0 / p)) / static_cast<double>(p);
    CHECK((j * j.transpose() - jj_want).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix x = static_cast<double>(p) * j * j.transpose();
    CHECK((x * x - x).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("covd_of_features: examples") {
  Matrix f(2, 2);
  f << 0, 2, 0, 0;
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1.0;
  CHECK((feature_covariance(f) - want).cwiseAbs().maxCoeff() <= 1e-15);

  const Matrix same = Vector(Eigen::Vector3d(1, 2, 3)).replicate(1, 6);
  CHECK(feature_covariance(same).cwiseAbs().maxCoeff() <= 1e-15);
  // Zero covariance: the ridge falls back to eps itself.
  const SpdMatrix reg = covd_of_features(FeatureMatrix{same}, 1e-3);
  CHECK((reg.data() - 1e-3 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("covd_of_features matches the J-form and a two-pass oracle") {
  SplitMix64 rng(46);
  Matrix f(4, 50);
  for (Index i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();
  Vector mean = Vector::Zero(4);
  for (Index c = 0; c < 50; ++c) mean += f.col(c);
  mean /= 50.0;
  Matrix two_pass = Matrix::Zero(4, 4);
  for (Index c = 0; c < 50; ++c) two_pass += (f.col(c) - mean) * (f.col(c) - mean).transpose();
  two_pass /= 50.0;
  const Matrix got = feature_covariance(f);
  CHECK((got - two_pass).cwiseAbs().maxCoeff() <= 1e-12);
  const Matrix j = centering_matrix(50);
  CHECK((got - f * j * j.transpose() * f.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  const double tr = two_pass.trace();
  const Matrix reg = covd_of_features(FeatureMatrix{f}, 1e-3).data();
  CHECK((reg - two_pass - 1e-3 * tr / 4.0 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("property: covariance is invariant to column order and translation") {
  SplitMix64 rng(47);
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(6));
    const Index p = 2 + static_cast<Index>(rng.below(60));
    Matrix f(d, p);
    for (Index i = 0; i < f.size(); ++i) f.data()[i] = rng.normal();
    std::vector<Index> perm(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) perm[static_cast<std::size_t>(i)] = i;
    aidcov::shuffle(perm, rng);
    Matrix g(d, p);
    for (Index i = 0; i < p; ++i) g.col(i) = f.col(perm[static_cast<std::size_t>(i)]);
    CHECK((feature_covariance(f) - feature_covariance(g)).cwiseAbs().maxCoeff() <= 1e-12);
    const Vector shift = testing::gaussian_vector(rng, d) * 5.0;
    const Matrix shifted = f.colwise() + shift;
    CHECK((feature_covariance(f) - feature_covariance(shifted)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("covd_of_features rejects non-finite input") {
  Matrix f = Matrix::Ones(2, 3);
  f(1, 1) = std::numeric_limits<double>::infinity();
  CHECK(error_code_of([&] { covd_of_features(FeatureMatrix{f}, 1e-3); }) ==
        code(ErrorCode::kInvalidArgument));
}

TEST_CASE("resize_bilinear: corner aligned") {
  Matrix src(3, 3);
  src << 0, 1, 2, 3, 4, 5, 6, 7, 8;
  const Matrix up = resize_bilinear(src, 5, 5);
  CHECK(up(0, 0) == 0.0);
  CHECK(up(4, 4) == 8.0);
  CHECK(up(0, 4) == 2.0);
  CHECK(up(2, 2) == 4.0);
  CHECK(std::abs(up(1, 1) - 2.0) <= 1e-15);  // midway between 0, 1, 3, 4
  CHECK(resize_bilinear(src, 3, 3) == src);
  // Affine images are reproduced exactly by bilinear sampling.
  Matrix plane(13, 17);
  for (Index y = 0; y < 13; ++y) {
    for (Index x = 0; x < 17; ++x) plane(y, x) = 0.1 * y + 0.03 * x;
  }
  const Matrix down = resize_bilinear(plane, 7, 5);
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 5; ++j) {
      CHECK(std::abs(down(i, j) - (0.1 * i * 2.0 + 0.03 * j * 4.0)) <= 1e-12);
    }
  }
}

TEST_CASE("traditional_set_covd: dimensions and closed forms") {
  SplitMix64 rng(48);
  ImageSet set{"a", "a/0", {}};
  for (int i = 0; i < 4; ++i) set.images.push_back(random_image(rng, 32, 24));
  CHECK(traditional_set_covd(set, 20, 20, 1e-3).dim() == 400);

  ImageSet same{"a", "a/1", {}};
  for (int i = 0; i < 3; ++i) same.images.push_back(set.images[0]);
  const Matrix v = vectorize_set(same, 20, 20);
  CHECK(v.rows() == 400);
  CHECK(v.cols() == 3);
  CHECK(feature_covariance(v).cwiseAbs().maxCoeff() <= 1e-15);

  ImageSet zero_one{"a", "a/2", {constant_image(16, 16, 0.0), constant_image(16, 16, 1.0)}};
  const Matrix c = feature_covariance(vectorize_set(zero_one, 20, 20));
  CHECK((c - Matrix::Constant(400, 400, 0.25)).cwiseAbs().maxCoeff() <= 1e-15);

  const ImageSet empty{"a", "a/3", {}};
  CHECK(error_code_of([&] { traditional_set_covd(empty, 20, 20, 1e-3); }) ==
        code(ErrorCode::kInvalidArgument));
}

TEST_CASE("vectorize_set: column-major order") {
  Matrix px = Matrix::Zero(8, 8);
  px(1, 0) = 1.0;  // row 1, column 0 -> second entry in column-major order
  const ImageSet set{"a", "a/0", {GrayImage(px)}};
  const Matrix v = vectorize_set(set, 8, 8);
  CHECK(v(1, 0) == 1.0);
  CHECK(v.col(0).sum() == 1.0);
}

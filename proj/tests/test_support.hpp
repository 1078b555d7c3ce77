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

// Test-side generators and reference implementations. Nothing here calls the
// library's own matrix functions, so they can serve as oracles.

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "random.hpp"
#include "spd.hpp"

namespace testing {

using aidcov::Index;
using aidcov::Matrix;
using aidcov::SplitMix64;
using aidcov::Vector;

inline Matrix householder(const Vector& v) {
  const Index n = v.size();
  return Matrix::Identity(n, n) - 2.0 * v * v.transpose() / v.squaredNorm();
}

inline Vector gaussian_vector(SplitMix64& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Product of n random Householder reflections.
inline Matrix random_orthogonal(SplitMix64& rng, Index n) {
  Matrix q = Matrix::Identity(n, n);
  for (Index k = 0; k < n; ++k) q = q * householder(gaussian_vector(rng, n));
  return q;
}

// Q diag(spectrum) Q^T with a random orthogonal Q.
inline Matrix with_spectrum(SplitMix64& rng, const Vector& spectrum) {
  const Matrix q = random_orthogonal(rng, spectrum.size());
  Matrix a = q * spectrum.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

// Random SPD matrix with condition number at most 10^log10_cond.
inline Matrix random_spd_matrix(SplitMix64& rng, Index n, double log10_cond = 2.0) {
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = std::pow(10.0, log10_cond * rng.uniform(-0.5, 0.5));
  return with_spectrum(rng, s);
}

inline aidcov::SpdMatrix random_spd(SplitMix64& rng, Index n, double log10_cond = 2.0) {
  return aidcov::SpdMatrix(random_spd_matrix(rng, n, log10_cond));
}

inline std::vector<aidcov::SpdMatrix> random_spd_set(SplitMix64& rng, std::size_t m, Index n,
                                                     double log10_cond = 1.0) {
  std::vector<aidcov::SpdMatrix> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(random_spd(rng, n, log10_cond));
  return out;
}

inline Matrix random_symmetric(SplitMix64& rng, Index n, double scale = 1.0) {
  Matrix s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) s(i, j) = s(j, i) = scale * rng.normal();
  }
  return s;
}

// Matrix exponential by scaling and squaring of a Taylor series.
inline Matrix expm_taylor(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Matrix x = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Matrix logarithm of an SPD matrix by inverse scaling and squaring: take
// Denman-Beavers square roots until close to I, then a Gregory series.
inline Matrix logm_reference(const Matrix& a) {
  const Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix x = a;
  int roots = 0;
  while ((x - id).norm() > 0.05) {
    Matrix y = x, z = id;
    for (int it = 0; it < 100; ++it) {
      const Matrix y_next = 0.5 * (y + z.inverse());
      const Matrix z_next = 0.5 * (z + y.inverse());
      const bool done = (y_next - y).norm() <= 1e-15 * y_next.norm();
      y = y_next;
      z = z_next;
      if (done) break;
    }
    x = 0.5 * (y + y.transpose());
    ++roots;
  }
  // log x = 2 atanh-series in u = (x - I)(x + I)^{-1}.
  const Matrix u = (x - id) * (x + id).inverse();
  const Matrix u2 = u * u;
  Matrix term = u, sum = Matrix::Zero(n, n);
  for (int k = 0; k < 40; ++k) {
    sum += term / static_cast<double>(2 * k + 1);
    term = term * u2;
  }
  Matrix out = std::pow(2.0, roots + 1) * sum;
  return 0.5 * (out + out.transpose());
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("aidcov_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

#include "error.hpp"

namespace testing {

// Runs fn and returns the ErrorCode it threw, or -1 when nothing was thrown.
template <typename F>
int error_code_of(F&& fn) {
  try {
    fn();
  } catch (const aidcov::Error& e) {
    return static_cast<int>(e.code());
  }
  return -1;
}

inline int code(aidcov::ErrorCode c) { return static_cast<int>(c); }

}  // namespace testing

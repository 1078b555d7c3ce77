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

#include "sampling.hpp"

#include <Eigen/QR>
#include <cmath>

namespace aidcov {

Matrix random_orthogonal(SplitMix64& rng, Index n) {
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

SpdMatrix random_spd(SplitMix64& rng, Index n, double log10_cond) {
  const Matrix q = random_orthogonal(rng, n);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = std::pow(10.0, rng.uniform(-0.5, 0.5) * log10_cond);
  Matrix a = q * d.asDiagonal() * q.transpose();
  return SpdMatrix(0.5 * (a + a.transpose()));
}

SymMatrix random_sym(SplitMix64& rng, Index n, double scale) {
  Matrix s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      s(i, j) = s(j, i) = scale * rng.normal();
    }
  }
  return SymMatrix(std::move(s));
}

}  // namespace aidcov

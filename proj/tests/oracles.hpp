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

// Independent reference implementations shared by the unit tests and the
// acceptance runner. Nothing here calls the library's numerical routines.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "classifiers.hpp"
#include "test_support.hpp"

namespace testing {

using aidcov::Index;
using aidcov::LabeledDescriptors;
using aidcov::Matrix;
using aidcov::SpdMatrix;
using aidcov::SplitMix64;
using aidcov::Vector;

// Clusters on the manifold: exp of Gaussian-perturbed symmetric anchors.
LabeledDescriptors clusters(SplitMix64& rng, int classes, int per_class, Index n, double spread) {
  LabeledDescriptors out;
  std::vector<Matrix> anchors;
  for (int c = 0; c < classes; ++c) anchors.push_back(random_symmetric(rng, n));
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < classes; ++c) {
      const Matrix s = anchors[static_cast<std::size_t>(c)] +
                       random_symmetric(rng, n, spread);
      out.descriptors.push_back(SpdMatrix(expm_taylor(s)));
      out.labels.push_back(c);
    }
  }
  return out;
}

double airm_oracle(const Matrix& a, const Matrix& b) {
  const Matrix li = Matrix(Eigen::LLT<Matrix>(a).matrixL()).inverse();
  Matrix w = li * b * li.transpose();
  w = 0.5 * (w + w.transpose());
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(w, Eigen::EigenvaluesOnly).eigenvalues();
  return std::sqrt(ev.array().log().square().sum());
}

std::vector<int> brute_force_nn(const LabeledDescriptors& train, std::span<const SpdMatrix> test,
                                bool airm) {
  std::vector<int> out;
  for (const auto& y : test) {
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (std::size_t i = 0; i < train.descriptors.size(); ++i) {
      const Matrix& a = train.descriptors[i].data();
      const double d = airm ? airm_oracle(a, y.data())
                            : (logm_reference(a) - logm_reference(y.data())).norm();
      if (d < best) {
        best = d;
        label = train.labels[i];
      }
    }
    out.push_back(label);
  }
  return out;
}

// Exhaustive oracle for min x^T K x - 2 k^T x + lambda |x|_1: every sign
// pattern fixes a smooth problem whose stationary point is checked for sign
// consistency; the optimum is the best consistent candidate.
double lasso_oracle(const Matrix& k, const Vector& ky, double lambda) {
  const Index m = k.rows();
  int patterns = 1;
  for (Index i = 0; i < m; ++i) patterns *= 3;
  double best = 0.0;  // x = 0
  for (int p = 1; p < patterns; ++p) {
    std::vector<Index> active;
    std::vector<double> sign;
    int q = p;
    for (Index i = 0; i < m; ++i, q /= 3) {
      if (q % 3 == 0) continue;
      active.push_back(i);
      sign.push_back(q % 3 == 1 ? 1.0 : -1.0);
    }
    const Index a = static_cast<Index>(active.size());
    Matrix kaa(a, a);
    Vector rhs(a);
    for (Index i = 0; i < a; ++i) {
      rhs(i) = ky(active[i]) - 0.5 * lambda * sign[static_cast<std::size_t>(i)];
      for (Index j = 0; j < a; ++j) kaa(i, j) = k(active[i], active[j]);
    }
    const Vector xa = kaa.ldlt().solve(rhs);
    bool consistent = true;
    for (Index i = 0; i < a; ++i) consistent &= xa(i) * sign[static_cast<std::size_t>(i)] > 0.0;
    if (!consistent) continue;
    Vector x = Vector::Zero(m);
    for (Index i = 0; i < a; ++i) x(active[i]) = xa(i);
    best = std::min(best, x.dot(k * x) - 2.0 * ky.dot(x) + lambda * x.lpNorm<1>());
  }
  return best;
}

// Two-class ridge LDA direction S_w^{-1} (mu0 - mu1), ridge scaled by tr(S_w)/n.
inline Vector lda_direction(const Matrix& x, const std::vector<int>& labels, double ridge) {
  const Index dim = x.rows();
  Vector mu0 = Vector::Zero(dim), mu1 = Vector::Zero(dim);
  double n0 = 0.0, n1 = 0.0;
  for (Index i = 0; i < x.cols(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == 0) {
      mu0 += x.col(i);
      n0 += 1.0;
    } else {
      mu1 += x.col(i);
      n1 += 1.0;
    }
  }
  mu0 /= n0;
  mu1 /= n1;
  Matrix sw = Matrix::Zero(dim, dim);
  for (Index i = 0; i < x.cols(); ++i) {
    const Vector d = x.col(i) - (labels[static_cast<std::size_t>(i)] == 0 ? mu0 : mu1);
    sw += d * d.transpose();
  }
  sw.diagonal().array() += ridge * sw.trace() / static_cast<double>(dim);
  return sw.ldlt().solve(mu0 - mu1);
}

}  // namespace testing

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

#include <Eigen/Core>
#include <memory>

namespace aidcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Eigenvalues in descending order, eigenvectors as the matching columns.
struct EigenPair {
  Vector values;
  Matrix vectors;
};

// Largest asymmetry tolerated by SymMatrix / SpdMatrix, relative to
// max(1, ||m||_F).
inline constexpr double kSymmetryTolerance = 1e-10;

bool is_symmetric(const Matrix& m, double rel_tol = kSymmetryTolerance);

// Element of the tangent space at the identity: a real symmetric matrix.
class SymMatrix {
 public:
  // Throws kInvalidArgument when m is not square or not symmetric.
  explicit SymMatrix(Matrix m);

  Index dim() const { return data_.rows(); }
  const Matrix& data() const { return data_; }

 private:
  Matrix data_;
};

// Validated symmetric positive-definite matrix. The eigendecomposition made
// during validation is kept and shared between copies, so log, inverse square
// root and conditioning queries never decompose twice.
class SpdMatrix {
 public:
  // Rejects non-square, asymmetric, non-finite or non-positive-definite input.
  explicit SpdMatrix(Matrix m);

  Index dim() const { return data_.rows(); }
  const Matrix& data() const { return data_; }
  const EigenPair& eig() const { return *eig_; }
  double min_eigenvalue() const { return eig_->values(eig_->values.size() - 1); }
  double max_eigenvalue() const { return eig_->values(0); }
  double condition_number() const { return max_eigenvalue() / min_eigenvalue(); }

 private:
  friend SpdMatrix exp_sym(const SymMatrix&);
  SpdMatrix(Matrix m, std::shared_ptr<const EigenPair> eig);

  Matrix data_;
  std::shared_ptr<const EigenPair> eig_;
};

// Symmetric eigendecomposition (tridiagonalisation + implicit QL).
EigenPair sym_eig(const SymMatrix& m);
EigenPair sym_eig(const Matrix& symmetric);

// V diag(f(lambda)) V^T, symmetrised.
template <typename F>
Matrix spectral_apply(const EigenPair& e, F&& f) {
  Vector mapped = e.values.unaryExpr(std::forward<F>(f));
  Matrix out = e.vectors * mapped.asDiagonal() * e.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

SymMatrix log_spd(const SpdMatrix& m);
// Plain-matrix variant used on hot paths that cache logs.
Matrix log_matrix(const SpdMatrix& m);

// Throws kNumerical when an eigenvalue exceeds the exp range (~700).
SpdMatrix exp_sym(const SymMatrix& m);

// Symmetrise and add a trace-scaled ridge: lambda = eps * trace / n
// (lambda = eps when the trace is not positive).
SpdMatrix make_spd(const Matrix& data, double eps);

Matrix inverse_sqrt(const SpdMatrix& m);

}  // namespace aidcov

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

#include "spd.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace aidcov {

namespace {

constexpr double kMaxExpArgument = 700.0;

void require_square(const Matrix& m, const char* what) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::kInvalidArgument,
          std::string(what) + ": matrix must be square and non-empty, got " +
              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

}  // namespace

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

SymMatrix::SymMatrix(Matrix m) : data_(std::move(m)) {
  require_square(data_, "SymMatrix");
  require(data_.allFinite(), ErrorCode::kInvalidArgument, "SymMatrix: non-finite entries");
  require(is_symmetric(data_), ErrorCode::kInvalidArgument,
          "SymMatrix: input is not symmetric within tolerance");
}

EigenPair sym_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "sym_eig: eigensolver did not converge (n=" << m.rows()
       << ", ||m||_F=" << m.norm() << ", max|m_ij|=" << m.cwiseAbs().maxCoeff()
       << ", finite=" << (m.allFinite() ? "yes" : "no") << ")";
    fail(ErrorCode::kNumerical, os.str());
  }
  // Solver returns ascending order.
  EigenPair e;
  e.values = solver.eigenvalues().reverse();
  e.vectors = solver.eigenvectors().rowwise().reverse();
  return e;
}

EigenPair sym_eig(const SymMatrix& m) { return sym_eig(m.data()); }

SpdMatrix::SpdMatrix(Matrix m) : data_(std::move(m)) {
  require_square(data_, "SpdMatrix");
  require(data_.allFinite(), ErrorCode::kInvalidArgument, "SpdMatrix: non-finite entries");
  require(is_symmetric(data_), ErrorCode::kInvalidArgument,
          "SpdMatrix: input is not symmetric within tolerance (use make_spd to symmetrise)");
  auto e = std::make_shared<EigenPair>(sym_eig(data_));
  const double lmin = e->values(e->values.size() - 1);
  if (!(lmin > 0.0)) {
    std::ostringstream os;
    os << "SpdMatrix: matrix is not positive definite (lambda_min=" << lmin
       << ", lambda_max=" << e->values(0) << "); regularise with a larger eps";
    fail(ErrorCode::kNumerical, os.str());
  }
  eig_ = std::move(e);
}

SpdMatrix::SpdMatrix(Matrix m, std::shared_ptr<const EigenPair> eig)
    : data_(std::move(m)), eig_(std::move(eig)) {}

Matrix log_matrix(const SpdMatrix& m) {
  return spectral_apply(m.eig(), [](double l) { return std::log(l); });
}

SymMatrix log_spd(const SpdMatrix& m) { return SymMatrix(log_matrix(m)); }

SpdMatrix exp_sym(const SymMatrix& m) {
  EigenPair e = sym_eig(m);
  if (e.values(0) > kMaxExpArgument) {
    std::ostringstream os;
    os << "exp_sym: eigenvalue " << e.values(0) << " exceeds the representable range ("
       << kMaxExpArgument << ")";
    fail(ErrorCode::kNumerical, os.str());
  }
  auto out = std::make_shared<EigenPair>();
  out->vectors = e.vectors;
  out->values = e.values.array().exp();
  if (!(out->values(out->values.size() - 1) > 0.0)) {
    fail(ErrorCode::kNumerical, "exp_sym: smallest eigenvalue underflows to zero");
  }
  Matrix data = spectral_apply(*out, [](double l) { return l; });
  return SpdMatrix(std::move(data), std::move(out));
}

SpdMatrix make_spd(const Matrix& data, double eps) {
  require_square(data, "make_spd");
  require(eps >= 0.0 && std::isfinite(eps), ErrorCode::kInvalidArgument,
          "make_spd: eps must be finite and non-negative");
  require(data.allFinite(), ErrorCode::kInvalidArgument, "make_spd: non-finite entries");
  Matrix sym = 0.5 * (data + data.transpose());
  const double n = static_cast<double>(sym.rows());
  const double tr = sym.trace();
  const double ridge = tr > 0.0 ? eps * tr / n : eps;
  if (ridge != 0.0) sym.diagonal().array() += ridge;
  try {
    return SpdMatrix(std::move(sym));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumerical) throw;
    std::ostringstream os;
    os << "make_spd: result is not positive definite with eps=" << eps
       << "; use a larger eps (" << e.what() << ")";
    fail(ErrorCode::kNumerical, os.str());
  }
}

Matrix inverse_sqrt(const SpdMatrix& m) {
  return spectral_apply(m.eig(), [](double l) { return 1.0 / std::sqrt(l); });
}

}  // namespace aidcov

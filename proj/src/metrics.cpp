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

#include "metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "error.hpp"

namespace aidcov {

namespace {

void require_same_dim(Index a, Index b, const char* op) {
  require(a == b, ErrorCode::kDimensionMismatch,
          std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
}

double check_finite(double v, const KernelSpec& spec) {
  if (!std::isfinite(v)) {
    fail(ErrorCode::kNumerical, std::string("kernel ") + kernel_kind_name(spec.kind) +
                                    " produced a non-finite value; rescale inputs");
  }
  return v;
}

}  // namespace

const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::kLogELinear: return "LOGE_LINEAR";
    case KernelKind::kLogEPoly: return "LOGE_POLY";
    case KernelKind::kLogEExp: return "LOGE_EXP";
    case KernelKind::kLogEGauss: return "LOGE_GAUSS";
  }
  return "?";
}

KernelKind parse_kernel_kind(const std::string& name) {
  for (KernelKind k : {KernelKind::kLogELinear, KernelKind::kLogEPoly, KernelKind::kLogEExp,
                       KernelKind::kLogEGauss}) {
    if (name == kernel_kind_name(k)) return k;
  }
  fail(ErrorCode::kConfig, "unknown kernel kind '" + name + "'");
}

KernelSpec KernelSpec::poly(int degree, std::vector<double> coeffs) {
  KernelSpec s;
  s.kind = KernelKind::kLogEPoly;
  s.degree = degree;
  s.coeffs = std::move(coeffs);
  s.validate();
  return s;
}

KernelSpec KernelSpec::exp(int degree, std::vector<double> coeffs) {
  KernelSpec s = poly(degree, std::move(coeffs));
  s.kind = KernelKind::kLogEExp;
  return s;
}

KernelSpec KernelSpec::gauss(double bandwidth) {
  KernelSpec s;
  s.kind = KernelKind::kLogEGauss;
  s.bandwidth = bandwidth;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::kLogEPoly || kind == KernelKind::kLogEExp) {
    require(degree >= 1, ErrorCode::kInvalidArgument, "kernel degree must be >= 1");
    require(!coeffs.empty() && coeffs.size() <= static_cast<std::size_t>(degree) + 1,
            ErrorCode::kInvalidArgument,
            "kernel coeffs must list 1..degree+1 coefficients from the leading term down");
    for (double c : coeffs) {
      require(c > 0.0 && std::isfinite(c), ErrorCode::kInvalidArgument,
              "kernel polynomial coefficients must be positive");
    }
  }
  if (kind == KernelKind::kLogEGauss) {
    require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorCode::kInvalidArgument,
            "kernel bandwidth must be positive");
  }
}

double KernelSpec::polynomial(double x) const {
  // Horner over degree+1 slots; unlisted trailing slots are zero.
  double acc = 0.0;
  for (int k = 0; k <= degree; ++k) {
    const double c = static_cast<std::size_t>(k) < coeffs.size() ? coeffs[k] : 0.0;
    acc = acc * x + c;
  }
  return acc;
}

void to_json(nlohmann::json& j, const KernelSpec& s) {
  j = nlohmann::json{{"kind", kernel_kind_name(s.kind)}};
  if (s.kind == KernelKind::kLogEPoly || s.kind == KernelKind::kLogEExp) {
    j["degree"] = s.degree;
    j["coeffs"] = s.coeffs;
  }
  if (s.kind == KernelKind::kLogEGauss) j["bandwidth"] = s.bandwidth;
}

void from_json(const nlohmann::json& j, KernelSpec& s) {
  s = KernelSpec{};
  s.kind = parse_kernel_kind(j.at("kind").get<std::string>());
  if (j.contains("degree")) s.degree = j.at("degree").get<int>();
  if (j.contains("coeffs")) s.coeffs = j.at("coeffs").get<std::vector<double>>();
  if (j.contains("bandwidth")) s.bandwidth = j.at("bandwidth").get<double>();
}

AirmAnchor::AirmAnchor(const SpdMatrix& a) : inv_sqrt_(inverse_sqrt(a)) {}

double AirmAnchor::distance(const SpdMatrix& b) const {
  require_same_dim(dim(), b.dim(), "airm_dist");
  Matrix m = inv_sqrt_ * b.data() * inv_sqrt_;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorCode::kNumerical,
          "airm_dist: eigensolver did not converge");
  double acc = 0.0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double l = solver.eigenvalues()(i);
    require(l > 0.0, ErrorCode::kNumerical,
            "airm_dist: whitened matrix lost positive definiteness (ill-conditioned input)");
    const double ll = std::log(l);
    acc += ll * ll;
  }
  return std::sqrt(acc);
}

double airm_dist(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "airm_dist");
  return AirmAnchor(a).distance(b);
}

double lem_dist(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "lem_dist");
  return (log_matrix(a) - log_matrix(b)).norm();
}

double loge_inner(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "loge_inner");
  return log_matrix(a).cwiseProduct(log_matrix(b)).sum();
}

double kernel_from_logs(const KernelSpec& spec, const Matrix& log_a, const Matrix& log_b) {
  require_same_dim(log_a.rows(), log_b.rows(), "kernel_eval");
  switch (spec.kind) {
    case KernelKind::kLogELinear:
      return log_a.cwiseProduct(log_b).sum();
    case KernelKind::kLogEPoly:
      return check_finite(spec.polynomial(log_a.cwiseProduct(log_b).sum()), spec);
    case KernelKind::kLogEExp:
      return check_finite(std::exp(spec.polynomial(log_a.cwiseProduct(log_b).sum())), spec);
    case KernelKind::kLogEGauss:
      return std::exp(-spec.bandwidth * (log_a - log_b).squaredNorm());
  }
  return 0.0;
}

double kernel_eval(const KernelSpec& spec, const SpdMatrix& a, const SpdMatrix& b) {
  spec.validate();
  require_same_dim(a.dim(), b.dim(), "kernel_eval");
  return kernel_from_logs(spec, log_matrix(a), log_matrix(b));
}

bool GramMatrix::is_numerically_psd(double rel_tol) const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(data, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) return false;
  const auto& ev = solver.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  return ev(0) >= -rel_tol * std::max(lmax, 0.0);
}

std::vector<Matrix> log_all(std::span<const SpdMatrix> set) {
  std::vector<Matrix> logs;
  logs.reserve(set.size());
  for (const auto& m : set) logs.push_back(log_matrix(m));
  return logs;
}

GramMatrix gram_from_logs(const KernelSpec& spec, std::span<const Matrix> logs) {
  spec.validate();
  require(!logs.empty(), ErrorCode::kInvalidArgument, "gram: empty set");
  const Index n = logs.front().rows();
  for (const auto& l : logs) require_same_dim(n, l.rows(), "gram");
  const Index m = static_cast<Index>(logs.size());
  GramMatrix g{Matrix(m, m), spec};
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      const double v = kernel_from_logs(spec, logs[i], logs[j]);
      g.data(i, j) = v;
      g.data(j, i) = v;
    }
  }
  return g;
}

GramMatrix gram(const KernelSpec& spec, std::span<const SpdMatrix> set) {
  spec.validate();
  require(!set.empty(), ErrorCode::kInvalidArgument, "gram: empty set");
  for (const auto& s : set) require_same_dim(set.front().dim(), s.dim(), "gram");
  const auto logs = log_all(set);
  return gram_from_logs(spec, logs);
}

Matrix cross_kernel(const KernelSpec& spec, std::span<const Matrix> left_logs,
                    std::span<const Matrix> right_logs) {
  Matrix out(static_cast<Index>(left_logs.size()), static_cast<Index>(right_logs.size()));
  for (std::size_t i = 0; i < left_logs.size(); ++i) {
    for (std::size_t j = 0; j < right_logs.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) =
          kernel_from_logs(spec, left_logs[i], right_logs[j]);
    }
  }
  return out;
}

Vector kernel_column(const KernelSpec& spec, std::span<const Matrix> logs, const Matrix& log_y) {
  Vector out(static_cast<Index>(logs.size()));
  for (std::size_t i = 0; i < logs.size(); ++i) {
    out(static_cast<Index>(i)) = kernel_from_logs(spec, logs[i], log_y);
  }
  return out;
}

}  // namespace aidcov

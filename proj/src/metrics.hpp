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
#include <span>
#include <string>
#include <vector>

#include "spd.hpp"

namespace aidcov {

enum class KernelKind { kLogELinear, kLogEPoly, kLogEExp, kLogEGauss };

const char* kernel_kind_name(KernelKind k);
KernelKind parse_kernel_kind(const std::string& name);

// Log-Euclidean kernel family.
//
//   LOGE_LINEAR  k(a, b) = tr(log a log b)
//   LOGE_POLY    k(a, b) = p(tr(log a log b))
//   LOGE_EXP     k(a, b) = exp(p(tr(log a log b)))
//   LOGE_GAUSS   k(a, b) = exp(-bandwidth * ||log a - log b||_F^2)
//
// The polynomial p has the given degree; `coeffs` lists its coefficients from
// the leading term down, so {degree = 2, coeffs = {1}} is x^2 and
// {degree = 2, coeffs = {1, 0.5, 2}} is x^2 + 0.5 x + 2. Omitted low-order
// terms are zero. All listed coefficients must be positive.
struct KernelSpec {
  KernelKind kind = KernelKind::kLogELinear;
  int degree = 2;
  std::vector<double> coeffs{1.0};
  double bandwidth = 1.0;

  static KernelSpec linear() { return {}; }
  static KernelSpec poly(int degree, std::vector<double> coeffs);
  static KernelSpec exp(int degree, std::vector<double> coeffs);
  static KernelSpec gauss(double bandwidth);

  // Throws kInvalidArgument when the invariants above are violated.
  void validate() const;
  double polynomial(double x) const;

  bool operator==(const KernelSpec&) const = default;
};

void to_json(nlohmann::json& j, const KernelSpec& s);
void from_json(const nlohmann::json& j, KernelSpec& s);

double airm_dist(const SpdMatrix& a, const SpdMatrix& b);
double lem_dist(const SpdMatrix& a, const SpdMatrix& b);
double loge_inner(const SpdMatrix& a, const SpdMatrix& b);
double kernel_eval(const KernelSpec& spec, const SpdMatrix& a, const SpdMatrix& b);

// Same kernel evaluated on precomputed matrix logarithms. tr(A B) for
// symmetric A, B is the sum of the elementwise product, so this is O(n^2).
double kernel_from_logs(const KernelSpec& spec, const Matrix& log_a, const Matrix& log_b);

// Caches a^{-1/2} so repeated AIRM distances from the same reference only
// cost two products and one eigenvalue solve.
class AirmAnchor {
 public:
  explicit AirmAnchor(const SpdMatrix& a);
  double distance(const SpdMatrix& b) const;
  Index dim() const { return inv_sqrt_.rows(); }

 private:
  Matrix inv_sqrt_;
};

struct GramMatrix {
  Matrix data;
  KernelSpec spec;

  Index size() const { return data.rows(); }
  // lambda_min >= -rel_tol * lambda_max
  bool is_numerically_psd(double rel_tol = 1e-8) const;
};

GramMatrix gram(const KernelSpec& spec, std::span<const SpdMatrix> set);
GramMatrix gram_from_logs(const KernelSpec& spec, std::span<const Matrix> logs);

// rows index `left`, columns index `right`
Matrix cross_kernel(const KernelSpec& spec, std::span<const Matrix> left_logs,
                    std::span<const Matrix> right_logs);
Vector kernel_column(const KernelSpec& spec, std::span<const Matrix> logs,
                     const Matrix& log_y);

std::vector<Matrix> log_all(std::span<const SpdMatrix> set);

}  // namespace aidcov

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

#include <span>
#include <vector>

#include "metrics.hpp"
#include "spd.hpp"

namespace aidcov {

struct LabeledDescriptors {
  std::vector<SpdMatrix> descriptors;
  std::vector<int> labels;

  // Equal lengths, non-empty, homogeneous dimension; with `trainable` also
  // at least two distinct classes.
  void validate(bool trainable) const;
};

// Upper-triangular half-vectorisation of log(m), off-diagonals scaled by
// sqrt(2) so that <logvec(a), logvec(b)> = tr(log a log b). Ordering is
// row by row: (m11, m12, ..., m1n, m22, ..., mnn).
Vector logvec(const SpdMatrix& m);
Vector logvec_from_log(const Matrix& log_m);

// ---------------------------------------------------------------------------
// Nearest neighbour

enum class NnMetric { kAirm, kLogEd };

struct NnMatch {
  int label;
  Index index;
  double distance;
};

class NnClassifier {
 public:
  NnClassifier(const LabeledDescriptors& train, NnMetric metric);

  NnMatch classify(const SpdMatrix& y) const;
  std::vector<int> predict(std::span<const SpdMatrix> test) const;

 private:
  NnMetric metric_;
  std::vector<int> labels_;
  std::vector<Matrix> logs_;         // LOGED
  std::vector<AirmAnchor> anchors_;  // AIRM
};

std::vector<int> nn_classify(const LabeledDescriptors& train, std::span<const SpdMatrix> test,
                             NnMetric metric);

// distances(t, i) = distance from test t to training item i. Ties go to the
// lowest training index.
std::vector<int> nn_from_distances(const Matrix& distances, std::span<const int> train_labels);

// ---------------------------------------------------------------------------
// Covariance discriminative learning: regularised Fisher LDA on logvec
// coordinates with a nearest-centroid decision.

struct CdlModel {
  Vector mean;                 // mean logvec of the training set
  Matrix projection;           // logvec_dim x (classes - 1)
  std::vector<int> class_ids;  // ascending
  Matrix centroids;            // (classes - 1) x classes
  double ridge = 0.0;

  Index logvec_dim() const { return mean.size(); }
};

CdlModel cdl_fit(const LabeledDescriptors& train, double ridge);
// Columns of `vectors` are samples.
CdlModel cdl_fit_vectors(const Matrix& vectors, std::span<const int> labels, double ridge);
std::vector<int> cdl_predict(const CdlModel& model, std::span<const SpdMatrix> test);
int cdl_predict_vector(const CdlModel& model, const Vector& v);

// ---------------------------------------------------------------------------
// Kernel sparse representation classification.
//
// For a query y with dictionary Gram K and kernel column k, solve
//   min_x  x^T K x - 2 k^T x + lambda ||x||_1
// by cyclic coordinate descent, then assign the class whose coefficients
// alone reconstruct phi(y) with the smallest RKHS residual.

struct SparseCodeOptions {
  double tolerance = 1e-8;  // max coefficient change in one sweep
  int max_sweeps = 10000;
};

struct SparseCodeResult {
  Vector x;
  int sweeps = 0;
  std::vector<double> objective_trace;  // objective after each sweep
  double duality_gap = 0.0;
};

double sparse_objective(const Matrix& k_dd, const Vector& k_y, double lambda, const Vector& x);
// Throws kConvergence (message carries the last duality-gap estimate) when
// max_sweeps is exhausted.
SparseCodeResult sparse_code(const Matrix& k_dd, const Vector& k_y, double k_yy, double lambda,
                             const SparseCodeOptions& options = {});

struct SrcModel {
  KernelSpec spec;
  std::vector<Matrix> logs;
  Matrix gram;                 // K_DD
  std::vector<int> labels;
  std::vector<int> class_ids;  // ascending
  double lambda = 1e-3;        // relative: effective weight is lambda * max|k_Dy|
  SparseCodeOptions options;
};

struct SrcDecision {
  int label;
  std::vector<double> residuals;  // parallel to class_ids
  SparseCodeResult code;
};

SrcModel src_fit(const LabeledDescriptors& train, const KernelSpec& spec, double lambda);
SrcModel src_fit_logs(std::vector<Matrix> logs, std::vector<int> labels, const KernelSpec& spec,
                      double lambda);
SrcDecision src_decide_log(const SrcModel& model, const Matrix& log_y);
std::vector<int> src_predict(const SrcModel& model, std::span<const SpdMatrix> test);

}  // namespace aidcov

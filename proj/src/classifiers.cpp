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

#include "classifiers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace aidcov {

void LabeledDescriptors::validate(bool trainable) const {
  require(descriptors.size() == labels.size(), ErrorCode::kInvalidArgument,
          "labeled descriptors: descriptor and label counts differ");
  require(!descriptors.empty(), ErrorCode::kInvalidArgument, "labeled descriptors: empty set");
  for (const auto& d : descriptors) {
    require(d.dim() == descriptors.front().dim(), ErrorCode::kDimensionMismatch,
            "labeled descriptors: mixed dimensions");
  }
  if (trainable) {
    const bool two = std::any_of(labels.begin(), labels.end(),
                                 [&](int l) { return l != labels.front(); });
    require(two, ErrorCode::kInvalidArgument, "classifier training needs at least two classes");
  }
}

Vector logvec_from_log(const Matrix& log_m) {
  const Index n = log_m.rows();
  Vector v(n * (n + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    v(k++) = log_m(i, i);
    for (Index j = i + 1; j < n; ++j) v(k++) = std::numbers::sqrt2 * log_m(i, j);
  }
  return v;
}

Vector logvec(const SpdMatrix& m) { return logvec_from_log(log_matrix(m)); }

namespace {

std::vector<int> sorted_classes(std::span<const int> labels) {
  std::vector<int> ids(labels.begin(), labels.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace

// --- nearest neighbour ------------------------------------------------------

NnClassifier::NnClassifier(const LabeledDescriptors& train, NnMetric metric)
    : metric_(metric), labels_(train.labels) {
  train.validate(false);
  if (metric == NnMetric::kLogEd) {
    logs_ = log_all(train.descriptors);
  } else {
    anchors_.reserve(train.descriptors.size());
    for (const auto& d : train.descriptors) anchors_.emplace_back(d);
  }
}

NnMatch NnClassifier::classify(const SpdMatrix& y) const {
  NnMatch best{labels_.front(), -1, std::numeric_limits<double>::infinity()};
  if (metric_ == NnMetric::kLogEd) {
    require(y.dim() == logs_.front().rows(), ErrorCode::kDimensionMismatch,
            "nn_classify: dimension mismatch");
    const Matrix ly = log_matrix(y);
    for (std::size_t i = 0; i < logs_.size(); ++i) {
      const double d = (logs_[i] - ly).norm();
      if (d < best.distance) best = {labels_[i], static_cast<Index>(i), d};
    }
  } else {
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
      const double d = anchors_[i].distance(y);
      if (d < best.distance) best = {labels_[i], static_cast<Index>(i), d};
    }
  }
  return best;
}

std::vector<int> NnClassifier::predict(std::span<const SpdMatrix> test) const {
  std::vector<int> out;
  out.reserve(test.size());
  for (const auto& y : test) out.push_back(classify(y).label);
  return out;
}

std::vector<int> nn_classify(const LabeledDescriptors& train, std::span<const SpdMatrix> test,
                             NnMetric metric) {
  return NnClassifier(train, metric).predict(test);
}

std::vector<int> nn_from_distances(const Matrix& distances, std::span<const int> train_labels) {
  require(distances.cols() == static_cast<Index>(train_labels.size()) && !train_labels.empty(),
          ErrorCode::kDimensionMismatch, "nn_from_distances: shape mismatch");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(distances.rows()));
  for (Index t = 0; t < distances.rows(); ++t) {
    Index best = 0;
    for (Index i = 1; i < distances.cols(); ++i) {
      if (distances(t, i) < distances(t, best)) best = i;
    }
    out.push_back(train_labels[static_cast<std::size_t>(best)]);
  }
  return out;
}

// --- CDL --------------------------------------------------------------------

CdlModel cdl_fit_vectors(const Matrix& vectors, std::span<const int> labels, double ridge) {
  require(vectors.cols() == static_cast<Index>(labels.size()) && vectors.cols() > 0,
          ErrorCode::kInvalidArgument, "cdl_fit: sample and label counts differ");
  require(ridge >= 0.0 && std::isfinite(ridge), ErrorCode::kInvalidArgument,
          "cdl_fit: ridge must be finite and non-negative");
  const std::vector<int> classes = sorted_classes(labels);
  require(classes.size() >= 2, ErrorCode::kInvalidArgument, "cdl_fit: need at least two classes");

  const Index dim = vectors.rows();
  const Index n = vectors.cols();
  CdlModel model;
  model.ridge = ridge;
  model.class_ids = classes;
  model.mean = vectors.rowwise().mean();
  const Matrix centered = vectors.colwise() - model.mean;

  // Every scatter matrix lives in the span of the centred samples, so the
  // problem is solved exactly in an orthonormal basis of that span. This keeps
  // the cost independent of the logvec dimension.
  const EigenPair sample_gram = sym_eig(Matrix(centered.transpose() * centered));
  const double top = sample_gram.values(0);
  require(top > 0.0, ErrorCode::kInvalidArgument,
          "cdl_fit: all training descriptors coincide; nothing to discriminate");
  Index rank = 0;
  while (rank < n && sample_gram.values(rank) > 1e-12 * top) ++rank;
  const Matrix basis = centered * sample_gram.vectors.leftCols(rank) *
                       sample_gram.values.head(rank).array().rsqrt().matrix().asDiagonal();
  const Matrix reduced = basis.transpose() * centered;  // rank x n

  std::map<int, std::size_t> slot;
  for (std::size_t c = 0; c < classes.size(); ++c) slot[classes[c]] = c;
  const Index k = static_cast<Index>(classes.size());
  Matrix class_means = Matrix::Zero(rank, k);
  Vector counts = Vector::Zero(k);
  for (Index i = 0; i < n; ++i) {
    const Index c = static_cast<Index>(slot[labels[static_cast<std::size_t>(i)]]);
    class_means.col(c) += reduced.col(i);
    counts(c) += 1.0;
  }
  for (Index c = 0; c < k; ++c) class_means.col(c) /= counts(c);

  Matrix within = Matrix::Zero(rank, rank);
  for (Index i = 0; i < n; ++i) {
    const Index c = static_cast<Index>(slot[labels[static_cast<std::size_t>(i)]]);
    const Vector d = reduced.col(i) - class_means.col(c);
    within.noalias() += d * d.transpose();
  }
  Matrix between = Matrix::Zero(rank, rank);
  for (Index c = 0; c < k; ++c) {
    between.noalias() += counts(c) * class_means.col(c) * class_means.col(c).transpose();
  }

  const double tr = within.trace();
  const double mu = tr > 0.0 ? ridge * tr / static_cast<double>(dim) : ridge;
  Matrix regularized = within;
  regularized.diagonal().array() += mu;
  const EigenPair reg = sym_eig(Matrix(0.5 * (regularized + regularized.transpose())));
  const double reg_min = reg.values(reg.values.size() - 1);
  if (!(reg_min > 1e-12 * std::max(reg.values(0), 1e-300))) {
    std::ostringstream os;
    os << "cdl_fit: regularised within-class scatter is singular (lambda_min=" << reg_min
       << "); use a larger ridge than " << ridge;
    fail(ErrorCode::kNumerical, os.str());
  }
  const Matrix whiten = spectral_apply(reg, [](double l) { return 1.0 / std::sqrt(l); });
  const EigenPair disc = sym_eig(Matrix(whiten * between * whiten));
  const Index out_dim = std::min<Index>(k - 1, rank);
  Matrix directions = whiten * disc.vectors.leftCols(out_dim);
  // Deterministic orientation: largest-|entry| of each direction positive.
  for (Index j = 0; j < directions.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < directions.rows(); ++i) {
      if (std::abs(directions(i, j)) > std::abs(directions(best, j))) best = i;
    }
    if (directions(best, j) < 0.0) directions.col(j) *= -1.0;
  }
  model.projection = basis * directions;
  model.centroids = directions.transpose() * class_means;
  return model;
}

CdlModel cdl_fit(const LabeledDescriptors& train, double ridge) {
  train.validate(true);
  const Index n = train.descriptors.front().dim();
  Matrix vectors(n * (n + 1) / 2, static_cast<Index>(train.descriptors.size()));
  for (std::size_t i = 0; i < train.descriptors.size(); ++i) {
    vectors.col(static_cast<Index>(i)) = logvec(train.descriptors[i]);
  }
  return cdl_fit_vectors(vectors, train.labels, ridge);
}

int cdl_predict_vector(const CdlModel& model, const Vector& v) {
  require(v.size() == model.logvec_dim(), ErrorCode::kDimensionMismatch,
          "cdl_predict: descriptor dimension does not match the model");
  const Vector y = model.projection.transpose() * (v - model.mean);
  std::size_t best = 0;
  double best_d = (model.centroids.col(0) - y).squaredNorm();
  for (std::size_t c = 1; c < model.class_ids.size(); ++c) {
    const double d = (model.centroids.col(static_cast<Index>(c)) - y).squaredNorm();
    // Distances equal up to rounding count as ties (lowest class id wins).
    if (d < best_d - 1e-12 * std::max(best_d, 1e-300)) {
      best = c;
      best_d = d;
    }
  }
  return model.class_ids[best];
}

std::vector<int> cdl_predict(const CdlModel& model, std::span<const SpdMatrix> test) {
  std::vector<int> out;
  out.reserve(test.size());
  for (const auto& y : test) out.push_back(cdl_predict_vector(model, logvec(y)));
  return out;
}

// --- kernel sparse representation ------------------------------------------

double sparse_objective(const Matrix& k_dd, const Vector& k_y, double lambda, const Vector& x) {
  return x.dot(k_dd * x) - 2.0 * k_y.dot(x) + lambda * x.lpNorm<1>();
}

namespace {

// Lasso duality gap in objective units. With Phi^T r = k - K x the kernel
// quantities give the residual norm and correlations without the feature map.
double duality_gap(const Vector& k_y, double k_yy, double lambda, const Vector& x,
                   const Vector& kx) {
  const double half_lambda = 0.5 * lambda;
  const double kx_dot = k_y.dot(x);
  const double r_sq = std::max(0.0, k_yy - 2.0 * kx_dot + x.dot(kx));
  const double primal = 0.5 * r_sq + half_lambda * x.lpNorm<1>();
  const double corr = (k_y - kx).lpNorm<Eigen::Infinity>();
  const double s = corr > 0.0 ? std::min(1.0, half_lambda / corr) : 1.0;
  const double dual = s * (k_yy - kx_dot) - 0.5 * s * s * r_sq;
  return 2.0 * (primal - dual);
}

}  // namespace

namespace {

constexpr int kSupportSolveEvery = 20;

// Solves the smooth problem on the current support and sign pattern exactly.
// Accepted only when the result keeps the signs, satisfies the optimality
// conditions off the support and does not increase the objective.
bool support_solve(const Matrix& k_dd, const Vector& k_y, double lambda, Vector& x, Vector& kx,
                   double& objective) {
  std::vector<Index> active;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) != 0.0) active.push_back(j);
  }
  if (active.empty()) return false;
  const Index a = static_cast<Index>(active.size());
  const double half_lambda = 0.5 * lambda;
  Matrix kaa(a, a);
  Vector rhs(a);
  for (Index i = 0; i < a; ++i) {
    rhs(i) = k_y(active[i]) - std::copysign(half_lambda, x(active[i]));
    for (Index j = 0; j < a; ++j) kaa(i, j) = k_dd(active[i], active[j]);
  }
  const Eigen::LDLT<Matrix> ldlt(kaa);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-10)) return false;
  const Vector xa = ldlt.solve(rhs);
  if (!xa.allFinite() || (kaa * xa - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) return false;
  Vector candidate = Vector::Zero(x.size());
  for (Index i = 0; i < a; ++i) {
    if (!(xa(i) * x(active[i]) > 0.0)) return false;
    candidate(active[i]) = xa(i);
  }
  const Vector k_candidate = k_dd * candidate;
  const double slack = 1e-9 * std::max(1.0, k_y.cwiseAbs().maxCoeff());
  for (Index j = 0; j < x.size(); ++j) {
    if (candidate(j) == 0.0 && std::abs(k_y(j) - k_candidate(j)) > half_lambda + slack) {
      return false;
    }
  }
  const double obj = candidate.dot(k_candidate) - 2.0 * k_y.dot(candidate) +
                     lambda * candidate.lpNorm<1>();
  if (obj > objective) return false;
  x = candidate;
  kx = k_candidate;
  objective = obj;
  return true;
}

}  // namespace

SparseCodeResult sparse_code(const Matrix& k_dd, const Vector& k_y, double k_yy, double lambda,
                             const SparseCodeOptions& options) {
  const Index m = k_dd.rows();
  require(k_dd.cols() == m && k_y.size() == m && m > 0, ErrorCode::kDimensionMismatch,
          "sparse_code: dictionary Gram and kernel column disagree");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::kInvalidArgument,
          "sparse_code: lambda must be finite and non-negative");
  SparseCodeResult res;
  res.x = Vector::Zero(m);
  Vector kx = Vector::Zero(m);  // K x, maintained incrementally
  double prev = 0.0;            // objective at x = 0
  const double half_lambda = 0.5 * lambda;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double kjj = k_dd(j, j);
      const double old = res.x(j);
      double updated = 0.0;
      if (kjj > 0.0) {
        const double rho = k_y(j) - kx(j) + kjj * old;
        const double shrunk = std::abs(rho) > half_lambda
                                  ? std::copysign(std::abs(rho) - half_lambda, rho)
                                  : 0.0;
        updated = shrunk / kjj;
      }
      const double delta = updated - old;
      if (delta != 0.0) {
        res.x(j) = updated;
        kx.noalias() += delta * k_dd.col(j);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    const double obj = res.x.dot(kx) - 2.0 * k_y.dot(res.x) + lambda * res.x.lpNorm<1>();
    if (obj > prev + 1e-9 * (1.0 + std::abs(prev))) {
      std::ostringstream os;
      os << "sparse_code: objective increased from " << prev << " to " << obj << " at sweep "
         << sweep;
      fail(ErrorCode::kNumerical, os.str());
    }
    res.objective_trace.push_back(obj);
    prev = obj;
    res.sweeps = sweep;
    if (max_change < options.tolerance) {
      res.duality_gap = duality_gap(k_y, k_yy, lambda, res.x, kx);
      return res;
    }
    // Coordinate descent is slow on ill-conditioned Grams once the support
    // has settled; an exact solve on that support finishes the job.
    if (sweep % kSupportSolveEvery == 0) support_solve(k_dd, k_y, lambda, res.x, kx, prev);
  }
  std::ostringstream os;
  os << "sparse_code: coordinate descent did not converge in " << options.max_sweeps
     << " sweeps (duality gap estimate " << duality_gap(k_y, k_yy, lambda, res.x, kx) << ")";
  fail(ErrorCode::kConvergence, os.str());
}

SrcModel src_fit_logs(std::vector<Matrix> logs, std::vector<int> labels, const KernelSpec& spec,
                      double lambda) {
  spec.validate();
  require(!logs.empty(), ErrorCode::kInvalidArgument, "src_fit: empty training set");
  require(logs.size() == labels.size(), ErrorCode::kInvalidArgument,
          "src_fit: descriptor and label counts differ");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::kInvalidArgument,
          "src_fit: lambda must be finite and non-negative");
  SrcModel model;
  model.spec = spec;
  GramMatrix g = gram_from_logs(spec, logs);
  if (!g.is_numerically_psd()) {
    fail(ErrorCode::kNumerical, "src_fit: dictionary Gram matrix is not numerically PSD");
  }
  model.gram = std::move(g.data);
  model.logs = std::move(logs);
  model.class_ids = sorted_classes(labels);
  model.labels = std::move(labels);
  model.lambda = lambda;
  return model;
}

SrcModel src_fit(const LabeledDescriptors& train, const KernelSpec& spec, double lambda) {
  train.validate(false);
  return src_fit_logs(log_all(train.descriptors), train.labels, spec, lambda);
}

SrcDecision src_decide_log(const SrcModel& model, const Matrix& log_y) {
  require(log_y.rows() == model.logs.front().rows(), ErrorCode::kDimensionMismatch,
          "src_predict: dimension mismatch");
  const Vector k_y = kernel_column(model.spec, model.logs, log_y);
  const double k_yy = kernel_from_logs(model.spec, log_y, log_y);
  const double lambda = model.lambda * k_y.cwiseAbs().maxCoeff();
  SrcDecision dec{model.class_ids.front(), {}, sparse_code(model.gram, k_y, k_yy, lambda, model.options)};
  const Vector& x = dec.code.x;
  double best = std::numeric_limits<double>::infinity();
  for (int c : model.class_ids) {
    // r_c = k(y,y) - 2 k_c^T x_c + x_c^T K_cc x_c
    double cross = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < model.labels.size(); ++i) {
      if (model.labels[i] != c || x(static_cast<Index>(i)) == 0.0) continue;
      const double xi = x(static_cast<Index>(i));
      cross += k_y(static_cast<Index>(i)) * xi;
      for (std::size_t j = 0; j < model.labels.size(); ++j) {
        if (model.labels[j] != c) continue;
        quad += xi * model.gram(static_cast<Index>(i), static_cast<Index>(j)) *
                x(static_cast<Index>(j));
      }
    }
    const double r = k_yy - 2.0 * cross + quad;
    dec.residuals.push_back(r);
    if (r < best) {
      best = r;
      dec.label = c;
    }
  }
  return dec;
}

std::vector<int> src_predict(const SrcModel& model, std::span<const SpdMatrix> test) {
  std::vector<int> out;
  out.reserve(test.size());
  for (const auto& y : test) out.push_back(src_decide_log(model, log_matrix(y)).label);
  return out;
}

}  // namespace aidcov

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

#include "nystrom.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace aidcov {

namespace {

// Largest-|entry| of each column made positive (first index wins ties).
void fix_signs(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    Index best = 0;
    for (Index i = 1; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > std::abs(v(best, j))) best = i;
    }
    if (v(best, j) < 0.0) v.col(j) *= -1.0;
  }
}

}  // namespace

NystromModel nystrom_fit_logs(std::vector<Matrix> landmark_logs, const KernelSpec& spec,
                              int target_dim) {
  spec.validate();
  require(!landmark_logs.empty(), ErrorCode::kInvalidArgument, "nystrom_fit: empty training set");
  const Index m = static_cast<Index>(landmark_logs.size());
  require(target_dim >= 1 && target_dim <= m, ErrorCode::kInvalidArgument,
          "nystrom_fit: target dimension D=" + std::to_string(target_dim) +
              " must satisfy 1 <= D <= M=" + std::to_string(m));

  NystromModel model;
  model.spec = spec;
  model.matrix_dim = landmark_logs.front().rows();
  model.requested_dim = target_dim;

  const GramMatrix k = gram_from_logs(spec, landmark_logs);
  EigenPair e = sym_eig(k.data);
  const double lmax = e.values(0);
  if (!(lmax > 0.0)) {
    fail(ErrorCode::kNumerical,
         "nystrom_fit: degenerate kernel matrix (largest eigenvalue " + std::to_string(lmax) +
             " is not positive)");
  }
  const double floor = kPsdFloorRatio * lmax;
  Index kept = 0;
  while (kept < target_dim && e.values(kept) > floor) ++kept;
  if (kept < target_dim) {
    std::ostringstream os;
    os << "nystrom_fit: kernel matrix has only " << kept << " eigenvalues above the floor "
       << floor << "; D reduced from " << target_dim << " to " << kept;
    model.warnings.push_back(os.str());
  }
  model.eigenvalues = e.values.head(kept);
  model.eigenvectors = e.vectors.leftCols(kept);
  fix_signs(model.eigenvectors);
  model.projection =
      model.eigenvalues.array().rsqrt().matrix().asDiagonal() * model.eigenvectors.transpose();
  model.landmark_logs = std::move(landmark_logs);
  return model;
}

NystromModel nystrom_fit(std::span<const SpdMatrix> train, const KernelSpec& spec,
                         int target_dim) {
  require(!train.empty(), ErrorCode::kInvalidArgument, "nystrom_fit: empty training set");
  for (const auto& s : train) {
    require(s.dim() == train.front().dim(), ErrorCode::kDimensionMismatch,
            "nystrom_fit: landmarks have mixed dimensions");
  }
  return nystrom_fit_logs(log_all(train), spec, target_dim);
}

Vector nystrom_embed_log(const NystromModel& model, const Matrix& log_y) {
  require(log_y.rows() == model.matrix_dim, ErrorCode::kDimensionMismatch,
          "nystrom_embed: matrix is " + std::to_string(log_y.rows()) + "x" +
              std::to_string(log_y.rows()) + " but the model expects " +
              std::to_string(model.matrix_dim) + "x" + std::to_string(model.matrix_dim));
  return model.projection * kernel_column(model.spec, model.landmark_logs, log_y);
}

Vector nystrom_embed(const NystromModel& model, const SpdMatrix& y) {
  require(y.dim() == model.matrix_dim, ErrorCode::kDimensionMismatch,
          "nystrom_embed: dimension mismatch");
  return nystrom_embed_log(model, log_matrix(y));
}

Matrix nystrom_batch_embed_logs(const NystromModel& model, std::span<const Matrix> log_ys) {
  Matrix z(model.dim(), static_cast<Index>(log_ys.size()));
  for (std::size_t i = 0; i < log_ys.size(); ++i) {
    z.col(static_cast<Index>(i)) = nystrom_embed_log(model, log_ys[i]);
  }
  return z;
}

Matrix nystrom_batch_embed(const NystromModel& model, std::span<const SpdMatrix> ys) {
  Matrix z(model.dim(), static_cast<Index>(ys.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) {
    z.col(static_cast<Index>(i)) = nystrom_embed(model, ys[i]);
  }
  return z;
}

Matrix nystrom_landmark_embedding(const NystromModel& model) {
  return model.eigenvalues.array().sqrt().matrix().asDiagonal() * model.eigenvectors.transpose();
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written in native little-endian order");

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& out, const double* p, Index n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(ErrorCode::kIo, path.string() + ": truncated Nystrom model file");
  return v;
}

void get_doubles(std::istream& in, double* p, Index n, const std::filesystem::path& path) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) fail(ErrorCode::kIo, path.string() + ": truncated Nystrom model file");
}

}  // namespace

void save_nystrom(const NystromModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, path.string() + ": cannot open for writing");
  out.write(kNystromMagic, sizeof(kNystromMagic));
  put(out, kNystromFormatVersion);
  const std::string spec = nlohmann::json(model.spec).dump();
  put(out, static_cast<std::uint64_t>(spec.size()));
  out.write(spec.data(), static_cast<std::streamsize>(spec.size()));
  put(out, static_cast<std::uint64_t>(model.dim()));
  put(out, static_cast<std::uint64_t>(model.landmarks()));
  put(out, static_cast<std::uint64_t>(model.matrix_dim));
  put(out, static_cast<std::int64_t>(model.requested_dim));
  put_doubles(out, model.eigenvalues.data(), model.eigenvalues.size());
  put_doubles(out, model.eigenvectors.data(), model.eigenvectors.size());
  for (const auto& l : model.landmark_logs) put_doubles(out, l.data(), l.size());
  if (!out) fail(ErrorCode::kIo, path.string() + ": write failed");
}

NystromModel load_nystrom(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, path.string() + ": cannot open");
  char magic[sizeof(kNystromMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kNystromMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::kIo, path.string() + ": not a Nystrom model file");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kNystromFormatVersion) {
    fail(ErrorCode::kIo, path.string() + ": unsupported model format version " +
                             std::to_string(version));
  }
  const auto spec_len = get<std::uint64_t>(in, path);
  if (spec_len > (1u << 20)) fail(ErrorCode::kIo, path.string() + ": corrupt header");
  std::string spec(spec_len, '\0');
  in.read(spec.data(), static_cast<std::streamsize>(spec_len));
  if (!in) fail(ErrorCode::kIo, path.string() + ": truncated Nystrom model file");

  NystromModel model;
  try {
    model.spec = nlohmann::json::parse(spec).get<KernelSpec>();
    model.spec.validate();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kIo, path.string() + ": bad kernel spec: " + e.what());
  }
  const auto d = static_cast<Index>(get<std::uint64_t>(in, path));
  const auto m = static_cast<Index>(get<std::uint64_t>(in, path));
  const auto n = static_cast<Index>(get<std::uint64_t>(in, path));
  model.requested_dim = static_cast<int>(get<std::int64_t>(in, path));
  if (d < 1 || m < d || n < 1 || m > (1 << 20) || n > (1 << 16)) {
    fail(ErrorCode::kIo, path.string() + ": corrupt model dimensions");
  }
  model.matrix_dim = n;
  model.eigenvalues.resize(d);
  model.eigenvectors.resize(m, d);
  get_doubles(in, model.eigenvalues.data(), d, path);
  get_doubles(in, model.eigenvectors.data(), m * d, path);
  model.landmark_logs.assign(static_cast<std::size_t>(m), Matrix(n, n));
  for (auto& l : model.landmark_logs) get_doubles(in, l.data(), n * n, path);
  model.projection =
      model.eigenvalues.array().rsqrt().matrix().asDiagonal() * model.eigenvectors.transpose();
  return model;
}

}  // namespace aidcov

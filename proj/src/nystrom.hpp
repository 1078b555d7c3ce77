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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "spd.hpp"

namespace aidcov {

// Eigenvalues at or below psd_floor_ratio * lambda_max are numerical zeros.
inline constexpr double kPsdFloorRatio = 1e-10;

// Nystrom approximation of the RKHS images of SPD matrices.
//
// Given landmarks Sp_1..Sp_M with Gram K, keep the top-D eigenpairs (E, V) of
// K and map any SPD matrix Y to
//
//   Z(Y) = E^{-1/2} V^T (k(Y, Sp_1), ..., k(Y, Sp_M))^T.
//
// Only the landmark logarithms are stored; every Log-Euclidean kernel is a
// function of log Y and log Sp_i.
struct NystromModel {
  KernelSpec spec;
  Index matrix_dim = 0;             // n, side of the landmark matrices
  std::vector<Matrix> landmark_logs;
  Vector eigenvalues;               // E, descending, length D
  Matrix eigenvectors;              // V, M x D
  Matrix projection;                // E^{-1/2} V^T, D x M
  int requested_dim = 0;
  std::vector<std::string> warnings;

  Index landmarks() const { return static_cast<Index>(landmark_logs.size()); }
  Index dim() const { return eigenvalues.size(); }
};

NystromModel nystrom_fit(std::span<const SpdMatrix> train, const KernelSpec& spec, int target_dim);
NystromModel nystrom_fit_logs(std::vector<Matrix> landmark_logs, const KernelSpec& spec,
                              int target_dim);

Vector nystrom_embed(const NystromModel& model, const SpdMatrix& y);
Vector nystrom_embed_log(const NystromModel& model, const Matrix& log_y);

// D x N, column i = nystrom_embed(ys[i]).
Matrix nystrom_batch_embed(const NystromModel& model, std::span<const SpdMatrix> ys);
Matrix nystrom_batch_embed_logs(const NystromModel& model, std::span<const Matrix> log_ys);

// E^{1/2} V^T: embeddings of the landmarks themselves.
Matrix nystrom_landmark_embedding(const NystromModel& model);

// Binary model file: magic "AIDCOVNY", format version, kernel spec as JSON,
// then D, M, n and the raw little-endian doubles of E, V and the landmark logs.
inline constexpr char kNystromMagic[8] = {'A', 'I', 'D', 'C', 'O', 'V', 'N', 'Y'};
inline constexpr std::uint32_t kNystromFormatVersion = 1;

void save_nystrom(const NystromModel& model, const std::filesystem::path& path);
NystromModel load_nystrom(const std::filesystem::path& path);

}  // namespace aidcov

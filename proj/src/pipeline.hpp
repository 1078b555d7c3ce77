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
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "features.hpp"
#include "nystrom.hpp"
#include "spd.hpp"

namespace aidcov {

enum class DescriptorMethod { kAid, kTraditional };

struct SetDescriptor {
  std::string label;
  SpdMatrix matrix;
  DescriptorMethod method;
};

// One regularised feature covariance per image of the set.
std::vector<SpdMatrix> image_covds(const ImageSet& set, const FeatureExtractor& extractor,
                                   double eps);
std::vector<SpdMatrix> image_covds(const ImageSet& set, const FeatureSpec& fspec, double eps);

// Covariance of the Nystrom embeddings of a set's per-image descriptors,
// C_Z = Z J_N J_N^T Z^T, then regularised. Z is D x N.
Matrix embedding_covariance(const Matrix& z);
SpdMatrix aid_covd_from_logs(std::span<const Matrix> image_logs, const NystromModel& model,
                             double eps);

SetDescriptor aid_covd(const ImageSet& set, const NystromModel& model, const FeatureSpec& fspec,
                       double eps);
SetDescriptor traditional_covd(const ImageSet& set, Index h, Index w, double eps);

// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string content_hash(const std::string& text);

// On-disk cache of per-set descriptor lists. Each entry is a binary file of
// matrices plus a JSON sidecar holding provenance.
class DescriptorCache {
 public:
  struct Key {
    std::string dataset;
    std::string set_id;
    std::string method;  // "IMAGE_COVDS" or "TRADITIONAL"
    std::string config_hash;
  };

  explicit DescriptorCache(std::filesystem::path dir);

  std::filesystem::path path_for(const Key& key) const;
  std::optional<std::vector<Matrix>> load(const Key& key) const;
  void store(const Key& key, std::span<const Matrix> matrices,
             const nlohmann::json& provenance) const;

 private:
  std::filesystem::path dir_;
};

inline constexpr char kCacheMagic[8] = {'A', 'I', 'D', 'C', 'O', 'V', 'D', 'S'};

}  // namespace aidcov

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

#include "pipeline.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace aidcov {

namespace fs = std::filesystem;

std::vector<SpdMatrix> image_covds(const ImageSet& set, const FeatureExtractor& extractor,
                                   double eps) {
  require(!set.images.empty(), ErrorCode::kInvalidArgument,
          "image_covds: image set '" + set.id + "' is empty");
  std::vector<SpdMatrix> out;
  out.reserve(set.images.size());
  for (const auto& img : set.images) out.push_back(covd_of_features(extractor(img), eps));
  return out;
}

std::vector<SpdMatrix> image_covds(const ImageSet& set, const FeatureSpec& fspec, double eps) {
  return image_covds(set, FeatureExtractor(fspec), eps);
}

Matrix embedding_covariance(const Matrix& z) {
  require(z.cols() >= 1, ErrorCode::kInvalidArgument, "aid_covd: empty image set");
  return feature_covariance(z);
}

SpdMatrix aid_covd_from_logs(std::span<const Matrix> image_logs, const NystromModel& model,
                             double eps) {
  require(!image_logs.empty(), ErrorCode::kInvalidArgument, "aid_covd: empty image set");
  require(image_logs.front().rows() == model.matrix_dim, ErrorCode::kDimensionMismatch,
          "aid_covd: per-image descriptors are " + std::to_string(image_logs.front().rows()) +
              "-dimensional but the Nystrom model expects " + std::to_string(model.matrix_dim));
  return make_spd(embedding_covariance(nystrom_batch_embed_logs(model, image_logs)), eps);
}

SetDescriptor aid_covd(const ImageSet& set, const NystromModel& model, const FeatureSpec& fspec,
                       double eps) {
  const auto covds = image_covds(set, fspec, eps);
  const auto logs = log_all(covds);
  return SetDescriptor{set.label, aid_covd_from_logs(logs, model, eps), DescriptorMethod::kAid};
}

SetDescriptor traditional_covd(const ImageSet& set, Index h, Index w, double eps) {
  return SetDescriptor{set.label, traditional_set_covd(set, h, w, eps),
                       DescriptorMethod::kTraditional};
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "_" : out;
}

}  // namespace

DescriptorCache::DescriptorCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::kIo, dir_.string() + ": cannot create cache directory: " + ec.message());
}

fs::path DescriptorCache::path_for(const Key& key) const {
  return dir_ / (sanitize(key.dataset) + "__" + sanitize(key.set_id) + "__" +
                 sanitize(key.method) + "__" + sanitize(key.config_hash) + ".bin");
}

std::optional<std::vector<Matrix>> DescriptorCache::load(const Key& key) const {
  const fs::path path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[sizeof(kCacheMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    fail(ErrorCode::kIo, path.string() + ": corrupt descriptor cache entry");
  }
  auto read_u64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) fail(ErrorCode::kIo, path.string() + ": truncated descriptor cache entry");
    return v;
  };
  const std::uint64_t count = read_u64();
  if (count > (1u << 24)) fail(ErrorCode::kIo, path.string() + ": corrupt descriptor cache entry");
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto rows = static_cast<Index>(read_u64());
    const auto cols = static_cast<Index>(read_u64());
    if (rows < 1 || cols < 1 || rows > (1 << 16) || cols > (1 << 16)) {
      fail(ErrorCode::kIo, path.string() + ": corrupt descriptor cache entry");
    }
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) fail(ErrorCode::kIo, path.string() + ": truncated descriptor cache entry");
    out.push_back(std::move(m));
  }
  return out;
}

void DescriptorCache::store(const Key& key, std::span<const Matrix> matrices,
                            const nlohmann::json& provenance) const {
  static_assert(std::endian::native == std::endian::little);
  const fs::path path = path_for(key);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::kIo, tmp.string() + ": cannot open for writing");
    out.write(kCacheMagic, sizeof(kCacheMagic));
    auto write_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    write_u64(matrices.size());
    for (const auto& m : matrices) {
      write_u64(static_cast<std::uint64_t>(m.rows()));
      write_u64(static_cast<std::uint64_t>(m.cols()));
      out.write(reinterpret_cast<const char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
    }
    if (!out) fail(ErrorCode::kIo, tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
  nlohmann::json side = provenance;
  side["dataset"] = key.dataset;
  side["set_id"] = key.set_id;
  side["method"] = key.method;
  side["config_hash"] = key.config_hash;
  side["count"] = matrices.size();
  fs::path side_path = path;
  side_path.replace_extension(".json");
  std::ofstream js(side_path);
  if (!js) fail(ErrorCode::kIo, side_path.string() + ": cannot open for writing");
  js << side.dump(2) << "\n";
}

}  // namespace aidcov

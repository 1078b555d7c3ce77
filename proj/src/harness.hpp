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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "image.hpp"
#include "pipeline.hpp"

namespace aidcov {

// Dataset layout: root/<class>/<set>/<image>. Traversal is lexicographic at
// every level; the label of a set is its class directory name.
std::vector<ImageSet> load_dataset(const std::filesystem::path& root);

// Oriented sinusoidal textures. Each class has its own frequency and
// orientation; every set is a viewpoint sweep (rotation and scale drift across
// its images) with a random per-set offset, per-image random phase and
// additive Gaussian pixel noise. Fully determined by spec.seed.
std::vector<ImageSet> synth_dataset(const SyntheticSpec& spec);

// Writes `sets` as 8-bit PGM files in the dataset layout above.
void write_dataset(std::span<const ImageSet> sets, const std::filesystem::path& root);

// Records which sets are test-side in the current split and rejects any fit
// operation that is handed one of them.
class LeakageGuard {
 public:
  explicit LeakageGuard(std::vector<bool> is_test) : is_test_(std::move(is_test)) {}

  // `origins` are the set indices feeding a fit; throws kLeakage on a test set.
  void check_fit(std::span<const std::size_t> origins, const std::string& what);
  std::size_t checked() const { return checked_; }

 private:
  std::vector<bool> is_test_;
  std::size_t checked_ = 0;
};

struct MethodResult {
  std::string name;
  double mean = 0.0;  // percent
  double std = 0.0;   // percent
  std::vector<double> per_trial;
  double seconds = 0.0;  // wall clock; not serialised into the JSON report

  bool operator==(const MethodResult&) const = default;
};

struct EvalReport {
  std::string dataset;
  std::string config_hash;
  std::uint64_t seed = 0;
  int trials = 0;
  bool sample_std = false;
  int test_sets_per_trial = 0;
  std::vector<MethodResult> methods;
  std::vector<std::string> warnings;
  std::size_t guarded_fits = 0;

  const MethodResult* find(const std::string& method) const;
};

// Mean and std (population or sample) of per-trial accuracies.
std::pair<double, double> mean_std(std::span<const double> values, bool sample_std);

// Per-image covariance descriptors and traditional set descriptors. These do
// not depend on the split, so they are computed once per dataset.
struct PreparedDataset {
  std::vector<int> class_of_set;
  std::vector<std::string> class_names;  // index = class id
  std::vector<std::vector<Matrix>> image_logs;  // per set: log of each image CovD
  std::vector<std::optional<SpdMatrix>> traditional;
  std::vector<Matrix> traditional_logs;
  std::size_t cache_hits = 0;
  std::size_t computed = 0;
};

using LogFn = std::function<void(const std::string&)>;

struct PrepareOptions {
  bool image_covds = true;
  bool traditional = true;
  const DescriptorCache* cache = nullptr;
  LogFn log;
};

PreparedDataset prepare_dataset(std::span<const ImageSet> data, const Config& config,
                                const PrepareOptions& options);

EvalReport run_protocol(std::span<const ImageSet> data, const Config& config,
                        const DescriptorCache* cache = nullptr, const LogFn& log = {});

enum class ReportFormat { kJson, kCsv, kTextTable };

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
std::string format_report(const EvalReport& report, ReportFormat format);
// Method x dataset table, "mean ± std" cells.
std::string format_table(std::span<const EvalReport> reports);
void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace aidcov

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

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "features.hpp"
#include "metrics.hpp"

namespace aidcov {

// The eight evaluated variants: four classifiers, each on traditional
// set covariances and on Nystrom-approximated ("_pro") descriptors.
enum class Method {
  kNnAirm,
  kNnAirmPro,
  kNnLogEd,
  kNnLogEdPro,
  kCdl,
  kCdlPro,
  kLogEksr,
  kLogEksrPro,
};

inline constexpr Method kAllMethods[] = {Method::kNnAirm, Method::kNnAirmPro, Method::kNnLogEd,
                                         Method::kNnLogEdPro, Method::kCdl, Method::kCdlPro,
                                         Method::kLogEksr, Method::kLogEksrPro};

const char* method_name(Method m);
Method parse_method(const std::string& name);
bool is_proposed(Method m);

struct Protocol {
  int trials = 10;
  int train_sets_per_class = 2;
  std::uint64_t seed = 2018;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  bool sample_std = false;  // population std by default
  std::string rng = "splitmix64";

  void validate() const;
};

struct NystromConfig {
  int target_dim = 40;  // D
  int landmarks = 60;   // M
  std::uint64_t seed = 1;
  bool refit_per_trial = true;
};

struct ClassifierConfig {
  double cdl_ridge = 1e-3;
  KernelSpec src_kernel = KernelSpec{KernelKind::kLogEPoly, 2, {1.0}, 1.0};
  double src_lambda = 1e-3;  // relative to max|k_Dy| per query
  double src_tolerance = 1e-8;
  int src_max_sweeps = 10000;
};

struct SyntheticSpec {
  int classes = 4;
  int sets_per_class = 10;
  int images_per_set = 15;
  int image_size = 32;
  double texture_frequency_separation = 1.0;
  double noise_level = 0.1;
  std::uint64_t seed = 7;

  void validate() const;
};

struct PathsConfig {
  std::string dataset;
  std::string cache;
  std::string output;
};

struct Config {
  std::string dataset_name = "dataset";
  FeatureSpec feature;
  KernelSpec kernel;  // kernel of the Nystrom embedding
  NystromConfig nystrom;
  double eps = 1e-3;
  int resize_h = 20;
  int resize_w = 20;
  Protocol protocol;
  ClassifierConfig classifiers;
  SyntheticSpec synth;
  PathsConfig paths;
  int jobs = 0;  // 0 = hardware concurrency

  // Rejects anything that would violate a module precondition (kConfig).
  void validate() const;

  // Hash over every field that influences results (paths and jobs excluded).
  std::string hash() const;
  // Hash over the fields that determine per-image / traditional descriptors.
  std::string descriptor_hash() const;
};

void to_json(nlohmann::json& j, const Protocol& p);
void from_json(const nlohmann::json& j, Protocol& p);
void to_json(nlohmann::json& j, const SyntheticSpec& s);
void from_json(const nlohmann::json& j, SyntheticSpec& s);
void to_json(nlohmann::json& j, const Config& c);
void from_json(const nlohmann::json& j, Config& c);

Config load_config(const std::string& path);
void save_config(const Config& config, const std::string& path);

// Sets a dotted key ("protocol.trials") in the JSON form of the config. The
// value is parsed as JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& config_json, const std::string& key, const std::string& value);

}  // namespace aidcov

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

#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>

#include "error.hpp"
#include "pipeline.hpp"

namespace aidcov {

using nlohmann::json;

const char* method_name(Method m) {
  switch (m) {
    case Method::kNnAirm: return "NN-AIRM";
    case Method::kNnAirmPro: return "NN-AIRM_pro";
    case Method::kNnLogEd: return "NN-LogED";
    case Method::kNnLogEdPro: return "NN-LogED_pro";
    case Method::kCdl: return "CDL";
    case Method::kCdlPro: return "CDL_pro";
    case Method::kLogEksr: return "LogEKSR";
    case Method::kLogEksrPro: return "LogEKSR_pro";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods) {
    if (name == method_name(m)) return m;
  }
  fail(ErrorCode::kConfig, "unknown method '" + name + "'");
}

bool is_proposed(Method m) {
  switch (m) {
    case Method::kNnAirmPro:
    case Method::kNnLogEdPro:
    case Method::kCdlPro:
    case Method::kLogEksrPro:
      return true;
    default:
      return false;
  }
}

namespace {

void config_require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::kConfig, "invalid config: " + what);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  config_require(j.is_object(), where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    config_require(ok, "unknown key '" + key + "' in " + where);
  }
}

// Wraps nlohmann type errors into config errors.
template <typename F>
auto config_parse(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, "invalid config in " + where + ": " + e.what());
  }
}

}  // namespace

void Protocol::validate() const {
  config_require(trials >= 1, "protocol.trials must be >= 1");
  config_require(train_sets_per_class >= 1, "protocol.train_sets_per_class must be >= 1");
  config_require(!methods.empty(), "protocol.methods must not be empty");
  config_require(rng == "splitmix64", "protocol.rng must be 'splitmix64'");
}

void SyntheticSpec::validate() const {
  config_require(classes >= 1 && sets_per_class >= 1 && images_per_set >= 1,
                 "synth counts must be positive");
  config_require(image_size >= static_cast<int>(kMinImageSide), "synth.image_size must be >= 8");
  config_require(texture_frequency_separation > 0.0, "synth.texture_frequency_separation must be > 0");
  config_require(noise_level >= 0.0 && std::isfinite(noise_level), "synth.noise_level must be >= 0");
}

void Config::validate() const {
  config_require(std::isfinite(eps) && eps >= 0.0, "eps must be finite and >= 0");
  config_require(resize_h >= 1 && resize_w >= 1, "resize dimensions must be positive");
  config_require(nystrom.target_dim >= 1, "nystrom.D must be >= 1");
  config_require(nystrom.landmarks >= nystrom.target_dim, "nystrom.M must be >= nystrom.D");
  config_require(classifiers.cdl_ridge >= 0.0, "classifiers.cdl_ridge must be >= 0");
  config_require(classifiers.src_lambda >= 0.0, "classifiers.src_lambda must be >= 0");
  config_require(classifiers.src_tolerance > 0.0, "classifiers.src_tolerance must be > 0");
  config_require(classifiers.src_max_sweeps >= 1, "classifiers.src_max_sweeps must be >= 1");
  config_require(jobs >= 0, "jobs must be >= 0");
  try {
    feature.validate();
    kernel.validate();
    classifiers.src_kernel.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("invalid config: ") + e.what());
  }
  protocol.validate();
  synth.validate();
}

std::string Config::hash() const {
  json j = *this;
  j.erase("paths");
  j.erase("jobs");
  return content_hash(j.dump());
}

std::string Config::descriptor_hash() const {
  json j{{"feature", feature}, {"eps", eps}, {"resize", {resize_h, resize_w}}};
  return content_hash(j.dump());
}

void to_json(json& j, const Protocol& p) {
  std::vector<std::string> names;
  for (Method m : p.methods) names.emplace_back(method_name(m));
  j = json{{"trials", p.trials},
           {"train_sets_per_class", p.train_sets_per_class},
           {"seed", p.seed},
           {"methods", names},
           {"std", p.sample_std ? "sample" : "population"},
           {"rng", p.rng}};
}

void from_json(const json& j, Protocol& p) {
  check_keys(j, {"trials", "train_sets_per_class", "seed", "methods", "std", "rng"}, "protocol");
  p = Protocol{};
  config_parse("protocol", [&] {
    p.trials = j.value("trials", p.trials);
    p.train_sets_per_class = j.value("train_sets_per_class", p.train_sets_per_class);
    p.seed = j.value("seed", p.seed);
    if (j.contains("methods")) {
      p.methods.clear();
      for (const auto& name : j.at("methods")) p.methods.push_back(parse_method(name.get<std::string>()));
    }
    const std::string std_kind = j.value("std", std::string("population"));
    config_require(std_kind == "population" || std_kind == "sample",
                   "protocol.std must be 'population' or 'sample'");
    p.sample_std = std_kind == "sample";
    p.rng = j.value("rng", p.rng);
    return 0;
  });
}

void to_json(json& j, const SyntheticSpec& s) {
  j = json{{"classes", s.classes},
           {"sets_per_class", s.sets_per_class},
           {"images_per_set", s.images_per_set},
           {"image_size", s.image_size},
           {"texture_frequency_separation", s.texture_frequency_separation},
           {"noise_level", s.noise_level},
           {"seed", s.seed}};
}

void from_json(const json& j, SyntheticSpec& s) {
  check_keys(j, {"classes", "sets_per_class", "images_per_set", "image_size",
                 "texture_frequency_separation", "noise_level", "seed"},
             "synth");
  s = SyntheticSpec{};
  config_parse("synth", [&] {
    s.classes = j.value("classes", s.classes);
    s.sets_per_class = j.value("sets_per_class", s.sets_per_class);
    s.images_per_set = j.value("images_per_set", s.images_per_set);
    s.image_size = j.value("image_size", s.image_size);
    s.texture_frequency_separation =
        j.value("texture_frequency_separation", s.texture_frequency_separation);
    s.noise_level = j.value("noise_level", s.noise_level);
    s.seed = j.value("seed", s.seed);
    return 0;
  });
}

void to_json(json& j, const Config& c) {
  j = json{
      {"dataset_name", c.dataset_name},
      {"feature", c.feature},
      {"kernel", c.kernel},
      {"nystrom",
       {{"D", c.nystrom.target_dim},
        {"M", c.nystrom.landmarks},
        {"seed", c.nystrom.seed},
        {"refit_per_trial", c.nystrom.refit_per_trial}}},
      {"eps", c.eps},
      {"resize", {c.resize_h, c.resize_w}},
      {"protocol", c.protocol},
      {"classifiers",
       {{"cdl_ridge", c.classifiers.cdl_ridge},
        {"src_kernel", c.classifiers.src_kernel},
        {"src_lambda", c.classifiers.src_lambda},
        {"src_tolerance", c.classifiers.src_tolerance},
        {"src_max_sweeps", c.classifiers.src_max_sweeps}}},
      {"synth", c.synth},
      {"paths", {{"dataset", c.paths.dataset}, {"cache", c.paths.cache}, {"output", c.paths.output}}},
      {"jobs", c.jobs},
  };
}

void from_json(const json& j, Config& c) {
  check_keys(j, {"dataset_name", "feature", "kernel", "nystrom", "eps", "resize", "protocol",
                 "classifiers", "synth", "paths", "jobs"},
             "config");
  c = Config{};
  config_parse("config", [&] {
    c.dataset_name = j.value("dataset_name", c.dataset_name);
    if (j.contains("feature")) {
      check_keys(j.at("feature"), {"kind", "scales", "orientations", "base_wavelength",
                                   "wavelength_ratio", "sigma_ratio", "support_sigmas", "stride"},
                 "feature");
      c.feature = j.at("feature").get<FeatureSpec>();
    }
    if (j.contains("kernel")) {
      check_keys(j.at("kernel"), {"kind", "degree", "coeffs", "bandwidth"}, "kernel");
      c.kernel = j.at("kernel").get<KernelSpec>();
    }
    if (j.contains("nystrom")) {
      const json& n = j.at("nystrom");
      check_keys(n, {"D", "M", "seed", "refit_per_trial"}, "nystrom");
      c.nystrom.target_dim = n.value("D", c.nystrom.target_dim);
      c.nystrom.landmarks = n.value("M", c.nystrom.landmarks);
      c.nystrom.seed = n.value("seed", c.nystrom.seed);
      c.nystrom.refit_per_trial = n.value("refit_per_trial", c.nystrom.refit_per_trial);
    }
    c.eps = j.value("eps", c.eps);
    if (j.contains("resize")) {
      const auto r = j.at("resize").get<std::vector<int>>();
      config_require(r.size() == 2, "resize must be [h, w]");
      c.resize_h = r[0];
      c.resize_w = r[1];
    }
    if (j.contains("protocol")) c.protocol = j.at("protocol").get<Protocol>();
    if (j.contains("classifiers")) {
      const json& k = j.at("classifiers");
      check_keys(k, {"cdl_ridge", "src_kernel", "src_lambda", "src_tolerance", "src_max_sweeps"},
                 "classifiers");
      c.classifiers.cdl_ridge = k.value("cdl_ridge", c.classifiers.cdl_ridge);
      if (k.contains("src_kernel")) c.classifiers.src_kernel = k.at("src_kernel").get<KernelSpec>();
      c.classifiers.src_lambda = k.value("src_lambda", c.classifiers.src_lambda);
      c.classifiers.src_tolerance = k.value("src_tolerance", c.classifiers.src_tolerance);
      c.classifiers.src_max_sweeps = k.value("src_max_sweeps", c.classifiers.src_max_sweeps);
    }
    if (j.contains("synth")) c.synth = j.at("synth").get<SyntheticSpec>();
    if (j.contains("paths")) {
      const json& p = j.at("paths");
      check_keys(p, {"dataset", "cache", "output"}, "paths");
      c.paths.dataset = p.value("dataset", c.paths.dataset);
      c.paths.cache = p.value("cache", c.paths.cache);
      c.paths.output = p.value("output", c.paths.output);
    }
    c.jobs = j.value("jobs", c.jobs);
    return 0;
  });
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfig, path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, path + ": malformed JSON: " + e.what());
  }
  return j.get<Config>();
}

void save_config(const Config& config, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) fail(ErrorCode::kIo, parent.string() + ": cannot create directory: " + ec.message());
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, path + ": cannot open for writing");
  out << json(config).dump(2) << "\n";
  if (!out) fail(ErrorCode::kIo, path + ": write failed");
}

void apply_override(json& config_json, const std::string& key, const std::string& value) {
  config_require(!key.empty(), "empty override key");
  json* node = &config_json;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    config_require(!part.empty(), "malformed override key '" + key + "'");
    config_require(node->is_object(), "override key '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::exception&) {
        parsed = value;
      }
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace aidcov

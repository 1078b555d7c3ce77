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

#include <aidcov/aidcov.h>

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "metrics.hpp"
#include "nystrom.hpp"
#include "pipeline.hpp"
#include "selftest.hpp"

struct aidcov_spd {
  aidcov::SpdMatrix m;
};
struct aidcov_nystrom {
  aidcov::NystromModel model;
};
struct aidcov_config {
  aidcov::Config config;
};
struct aidcov_dataset {
  std::vector<aidcov::ImageSet> sets;
  std::string name;
};
struct aidcov_report {
  aidcov::EvalReport report;
};
struct aidcov_selftest {
  std::vector<aidcov::SelfTestResult> items;
};

namespace {

using aidcov::ErrorCode;

thread_local std::string g_last_error;

aidcov_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return AIDCOV_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimensionMismatch: return AIDCOV_ERR_DIMENSION;
    case ErrorCode::kNumerical: return AIDCOV_ERR_NUMERICAL;
    case ErrorCode::kConvergence: return AIDCOV_ERR_CONVERGENCE;
    case ErrorCode::kIo: return AIDCOV_ERR_IO;
    case ErrorCode::kConfig: return AIDCOV_ERR_CONFIG;
    case ErrorCode::kLeakage: return AIDCOV_ERR_LEAKAGE;
  }
  return AIDCOV_ERR_INTERNAL;
}

template <typename F>
aidcov_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AIDCOV_OK;
  } catch (const aidcov::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return AIDCOV_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AIDCOV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AIDCOV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return AIDCOV_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) aidcov::fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

aidcov::Matrix copy_in(const double* data, size_t n) {
  need(data, "data");
  if (n == 0) aidcov::fail(ErrorCode::kInvalidArgument, "matrix dimension must be positive");
  const auto dim = static_cast<aidcov::Index>(n);
  return Eigen::Map<const aidcov::Matrix>(data, dim, dim);
}

void copy_out(const aidcov::Matrix& m, double* out) {
  need(out, "out");
  std::memcpy(out, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
}

aidcov::KernelSpec parse_kernel(const char* kernel_json) {
  if (kernel_json == nullptr || *kernel_json == '\0') return aidcov::KernelSpec::linear();
  aidcov::KernelSpec spec = nlohmann::json::parse(kernel_json).get<aidcov::KernelSpec>();
  spec.validate();
  return spec;
}

std::vector<aidcov::SpdMatrix> gather(const aidcov_spd* const* set, size_t m) {
  need(set, "set");
  std::vector<aidcov::SpdMatrix> out;
  out.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    need(set[i], "set element");
    out.push_back(set[i]->m);
  }
  return out;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aidcov::ReportFormat report_format(aidcov_report_format f) {
  switch (f) {
    case AIDCOV_REPORT_JSON: return aidcov::ReportFormat::kJson;
    case AIDCOV_REPORT_CSV: return aidcov::ReportFormat::kCsv;
    case AIDCOV_REPORT_TEXT: return aidcov::ReportFormat::kTextTable;
  }
  aidcov::fail(ErrorCode::kInvalidArgument, "unknown report format");
}

std::string dataset_name(const aidcov::Config& config, const aidcov_dataset* dataset) {
  return dataset->name.empty() ? config.dataset_name : dataset->name;
}

}  // namespace

extern "C" {

const char* aidcov_version(void) { return "1.0.0"; }

const char* aidcov_last_error(void) { return g_last_error.c_str(); }

const char* aidcov_status_name(aidcov_status status) {
  switch (status) {
    case AIDCOV_OK: return "OK";
    case AIDCOV_ERR_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
    case AIDCOV_ERR_DIMENSION: return "DIMENSION_MISMATCH";
    case AIDCOV_ERR_NUMERICAL: return "NUMERICAL";
    case AIDCOV_ERR_CONVERGENCE: return "CONVERGENCE";
    case AIDCOV_ERR_IO: return "IO";
    case AIDCOV_ERR_CONFIG: return "CONFIG";
    case AIDCOV_ERR_LEAKAGE: return "LEAKAGE";
    case AIDCOV_ERR_INTERNAL: return "INTERNAL";
  }
  return "UNKNOWN";
}

void aidcov_string_free(char* s) { std::free(s); }

aidcov_status aidcov_spd_create(const double* data, size_t n, aidcov_spd** out) {
  return guard([&] {
    need(out, "out");
    *out = new aidcov_spd{aidcov::SpdMatrix(copy_in(data, n))};
  });
}

aidcov_status aidcov_spd_regularize(const double* data, size_t n, double eps, aidcov_spd** out) {
  return guard([&] {
    need(out, "out");
    *out = new aidcov_spd{aidcov::make_spd(copy_in(data, n), eps)};
  });
}

aidcov_status aidcov_spd_exp(const double* sym, size_t n, aidcov_spd** out) {
  return guard([&] {
    need(out, "out");
    *out = new aidcov_spd{aidcov::exp_sym(aidcov::SymMatrix(copy_in(sym, n)))};
  });
}

void aidcov_spd_free(aidcov_spd* m) { delete m; }

size_t aidcov_spd_dim(const aidcov_spd* m) {
  return m == nullptr ? 0 : static_cast<size_t>(m->m.dim());
}

aidcov_status aidcov_spd_data(const aidcov_spd* m, double* out) {
  return guard([&] {
    need(m, "matrix");
    copy_out(m->m.data(), out);
  });
}

aidcov_status aidcov_spd_log(const aidcov_spd* m, double* out) {
  return guard([&] {
    need(m, "matrix");
    copy_out(aidcov::log_matrix(m->m), out);
  });
}

aidcov_status aidcov_spd_eigenvalues(const aidcov_spd* m, double* out) {
  return guard([&] {
    need(m, "matrix");
    copy_out(m->m.eig().values, out);
  });
}

aidcov_status aidcov_airm_distance(const aidcov_spd* a, const aidcov_spd* b, double* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = aidcov::airm_dist(a->m, b->m);
  });
}

aidcov_status aidcov_lem_distance(const aidcov_spd* a, const aidcov_spd* b, double* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = aidcov::lem_dist(a->m, b->m);
  });
}

aidcov_status aidcov_kernel(const char* kernel_json, const aidcov_spd* a, const aidcov_spd* b,
                            double* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    *out = aidcov::kernel_eval(parse_kernel(kernel_json), a->m, b->m);
  });
}

aidcov_status aidcov_gram(const char* kernel_json, const aidcov_spd* const* set, size_t m,
                          double* out) {
  return guard([&] {
    const auto mats = gather(set, m);
    copy_out(aidcov::gram(parse_kernel(kernel_json), mats).data, out);
  });
}

aidcov_status aidcov_nystrom_fit(const char* kernel_json, const aidcov_spd* const* landmarks,
                                 size_t m, int target_dim, aidcov_nystrom** out) {
  return guard([&] {
    need(out, "out");
    const auto mats = gather(landmarks, m);
    *out = new aidcov_nystrom{aidcov::nystrom_fit(mats, parse_kernel(kernel_json), target_dim)};
  });
}

void aidcov_nystrom_free(aidcov_nystrom* model) { delete model; }

size_t aidcov_nystrom_dim(const aidcov_nystrom* model) {
  return model == nullptr ? 0 : static_cast<size_t>(model->model.dim());
}

size_t aidcov_nystrom_landmarks(const aidcov_nystrom* model) {
  return model == nullptr ? 0 : static_cast<size_t>(model->model.landmarks());
}

aidcov_status aidcov_nystrom_embed(const aidcov_nystrom* model, const aidcov_spd* y, double* out) {
  return guard([&] {
    need(model, "model");
    need(y, "y");
    copy_out(aidcov::nystrom_embed(model->model, y->m), out);
  });
}

aidcov_status aidcov_aid_covd(const aidcov_nystrom* model, const aidcov_spd* const* set, size_t n,
                              double eps, aidcov_spd** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    const auto mats = gather(set, n);
    const auto logs = aidcov::log_all(mats);
    *out = new aidcov_spd{aidcov::aid_covd_from_logs(logs, model->model, eps)};
  });
}

aidcov_status aidcov_nystrom_save(const aidcov_nystrom* model, const char* path) {
  return guard([&] {
    need(model, "model");
    need(path, "path");
    aidcov::save_nystrom(model->model, path);
  });
}

aidcov_status aidcov_nystrom_load(const char* path, aidcov_nystrom** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new aidcov_nystrom{aidcov::load_nystrom(path)};
  });
}

aidcov_status aidcov_config_default(aidcov_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new aidcov_config{};
  });
}

aidcov_status aidcov_config_load(const char* path, aidcov_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new aidcov_config{aidcov::load_config(path)};
  });
}

void aidcov_config_free(aidcov_config* config) { delete config; }

aidcov_status aidcov_config_set(aidcov_config* config, const char* key, const char* value) {
  return guard([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    nlohmann::json j = config->config;
    aidcov::apply_override(j, key, value);
    config->config = j.get<aidcov::Config>();
  });
}

aidcov_status aidcov_config_get(const aidcov_config* config, const char* key, char** out) {
  return guard([&] {
    need(config, "config");
    need(key, "key");
    need(out, "out");
    const nlohmann::json j = config->config;
    const nlohmann::json* node = &j;
    std::string path(key);
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string part = path.substr(start, dot == std::string::npos ? dot : dot - start);
      if (!node->is_object() || !node->contains(part)) {
        aidcov::fail(ErrorCode::kConfig, "unknown config key: " + path);
      }
      node = &(*node)[part];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    *out = dup_string(node->is_string() ? node->get<std::string>() : node->dump());
  });
}

aidcov_status aidcov_config_validate(const aidcov_config* config) {
  return guard([&] {
    need(config, "config");
    config->config.validate();
  });
}

aidcov_status aidcov_config_hash(const aidcov_config* config, char out[17]) {
  return guard([&] {
    need(config, "config");
    need(out, "out");
    const std::string h = config->config.hash();
    std::memcpy(out, h.c_str(), 17);
  });
}

aidcov_status aidcov_config_to_json(const aidcov_config* config, char** out) {
  return guard([&] {
    need(config, "config");
    need(out, "out");
    *out = dup_string(nlohmann::json(config->config).dump(2) + "\n");
  });
}

aidcov_status aidcov_config_save(const aidcov_config* config, const char* path) {
  return guard([&] {
    need(config, "config");
    need(path, "path");
    aidcov::save_config(config->config, path);
  });
}

aidcov_status aidcov_dataset_load(const char* root, aidcov_dataset** out) {
  return guard([&] {
    need(root, "root");
    need(out, "out");
    *out = new aidcov_dataset{aidcov::load_dataset(root), {}};
  });
}

aidcov_status aidcov_dataset_synth(const aidcov_config* config, aidcov_dataset** out) {
  return guard([&] {
    need(config, "config");
    need(out, "out");
    *out = new aidcov_dataset{aidcov::synth_dataset(config->config.synth), {}};
  });
}

aidcov_status aidcov_dataset_write(const aidcov_dataset* dataset, const char* root) {
  return guard([&] {
    need(dataset, "dataset");
    need(root, "root");
    aidcov::write_dataset(dataset->sets, root);
  });
}

void aidcov_dataset_free(aidcov_dataset* dataset) { delete dataset; }

size_t aidcov_dataset_sets(const aidcov_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->sets.size();
}

size_t aidcov_dataset_images(const aidcov_dataset* dataset) {
  if (dataset == nullptr) return 0;
  size_t n = 0;
  for (const auto& s : dataset->sets) n += s.images.size();
  return n;
}

aidcov_status aidcov_extract(const aidcov_config* config, const aidcov_dataset* dataset,
                             const char* cache_dir, size_t* computed, size_t* cache_hits) {
  return guard([&] {
    need(config, "config");
    need(dataset, "dataset");
    need(cache_dir, "cache_dir");
    config->config.validate();
    aidcov::Config cfg = config->config;
    cfg.dataset_name = dataset_name(cfg, dataset);
    const aidcov::DescriptorCache cache(cache_dir);
    aidcov::PrepareOptions options;
    options.cache = &cache;
    const auto prepared = aidcov::prepare_dataset(dataset->sets, cfg, options);
    if (computed != nullptr) *computed = prepared.computed;
    if (cache_hits != nullptr) *cache_hits = prepared.cache_hits;
  });
}

aidcov_status aidcov_eval(const aidcov_config* config, const aidcov_dataset* dataset,
                          const char* cache_dir, aidcov_log_fn log, void* user,
                          aidcov_report** out) {
  return guard([&] {
    need(config, "config");
    need(dataset, "dataset");
    need(out, "out");
    config->config.validate();
    aidcov::Config cfg = config->config;
    cfg.dataset_name = dataset_name(cfg, dataset);
    std::unique_ptr<aidcov::DescriptorCache> cache;
    if (cache_dir != nullptr && *cache_dir != '\0') {
      cache = std::make_unique<aidcov::DescriptorCache>(cache_dir);
    }
    aidcov::LogFn log_fn;
    if (log != nullptr) log_fn = [log, user](const std::string& msg) { log(msg.c_str(), user); };
    *out = new aidcov_report{aidcov::run_protocol(dataset->sets, cfg, cache.get(), log_fn)};
  });
}

void aidcov_report_free(aidcov_report* report) { delete report; }

aidcov_status aidcov_report_write(const aidcov_report* report, aidcov_report_format format,
                                  const char* path) {
  return guard([&] {
    need(report, "report");
    need(path, "path");
    aidcov::emit_report(report->report, report_format(format), path);
  });
}

aidcov_status aidcov_report_format_string(const aidcov_report* report,
                                          aidcov_report_format format, char** out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(aidcov::format_report(report->report, report_format(format)));
  });
}

aidcov_status aidcov_report_write_timings(const aidcov_report* report, const char* path) {
  return guard([&] {
    need(report, "report");
    need(path, "path");
    nlohmann::ordered_json j;
    j["dataset"] = report->report.dataset;
    nlohmann::ordered_json seconds = nlohmann::ordered_json::object();
    for (const auto& m : report->report.methods) seconds[m.name] = m.seconds;
    j["seconds"] = seconds;
    std::ofstream f(path, std::ios::binary);
    if (!f) aidcov::fail(ErrorCode::kIo, std::string("cannot write ") + path);
    f << j.dump(2) << "\n";
    if (!f) aidcov::fail(ErrorCode::kIo, std::string("write failed: ") + path);
  });
}

size_t aidcov_report_methods(const aidcov_report* report) {
  return report == nullptr ? 0 : report->report.methods.size();
}

aidcov_status aidcov_report_method(const aidcov_report* report, size_t i, const char** name,
                                   double* mean, double* std) {
  return guard([&] {
    need(report, "report");
    if (i >= report->report.methods.size()) {
      aidcov::fail(ErrorCode::kInvalidArgument, "method index out of range");
    }
    const auto& m = report->report.methods[i];
    if (name != nullptr) *name = m.name.c_str();
    if (mean != nullptr) *mean = m.mean;
    if (std != nullptr) *std = m.std;
  });
}

size_t aidcov_report_warnings(const aidcov_report* report) {
  return report == nullptr ? 0 : report->report.warnings.size();
}

const char* aidcov_report_warning(const aidcov_report* report, size_t i) {
  if (report == nullptr || i >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[i].c_str();
}

aidcov_status aidcov_selftest_run(uint64_t seed, aidcov_selftest** out) {
  return guard([&] {
    need(out, "out");
    *out = new aidcov_selftest{aidcov::run_selftest(seed)};
  });
}

void aidcov_selftest_free(aidcov_selftest* result) { delete result; }

size_t aidcov_selftest_count(const aidcov_selftest* result) {
  return result == nullptr ? 0 : result->items.size();
}

aidcov_status aidcov_selftest_item(const aidcov_selftest* result, size_t i, const char** name,
                                   int* passed, const char** detail) {
  return guard([&] {
    need(result, "result");
    if (i >= result->items.size()) {
      aidcov::fail(ErrorCode::kInvalidArgument, "selftest index out of range");
    }
    const auto& item = result->items[i];
    if (name != nullptr) *name = item.name.c_str();
    if (passed != nullptr) *passed = item.passed ? 1 : 0;
    if (detail != nullptr) *detail = item.detail.c_str();
  });
}

}  // extern "C"

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

// Command-line front end. Uses only the public C API.
#include <aidcov/aidcov.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitConfig = 2;

struct CliFailure {
  int exit_code;
};

int exit_code_for(aidcov_status s) {
  if (s == AIDCOV_OK) return kExitOk;
  if (s == AIDCOV_ERR_CONFIG || s == AIDCOV_ERR_IO) return kExitConfig;
  return kExitCompute;
}

void check(aidcov_status s, const std::string& context) {
  if (s == AIDCOV_OK) return;
  std::cerr << "aidcov: " << context << ": " << aidcov_status_name(s) << ": "
            << aidcov_last_error() << "\n";
  throw CliFailure{exit_code_for(s)};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using ConfigHandle = Handle<aidcov_config, aidcov_config_free>;
using DatasetHandle = Handle<aidcov_dataset, aidcov_dataset_free>;
using ReportHandle = Handle<aidcov_report, aidcov_report_free>;
using SelftestHandle = Handle<aidcov_selftest, aidcov_selftest_free>;

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Options shared by every command. Each flag maps to exactly one config key.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> dataset, cache, output, methods;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, jobs;
  bool quiet = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON config file (defaults when omitted)");
    app->add_option("--set", sets, "Override a config key: key=value (repeatable)");
    app->add_option("--dataset", dataset, "paths.dataset");
    app->add_option("--cache", cache, "paths.cache");
    app->add_option("--output", output, "paths.output");
    app->add_option("--methods", methods, "protocol.methods, comma separated");
    app->add_option("--seed", seed, "protocol.seed");
    app->add_option("--trials", trials, "protocol.trials");
    app->add_option("--jobs", jobs, "jobs (0 = all hardware threads)");
    app->add_flag("-q,--quiet", quiet, "Suppress progress output");
  }

  void apply(aidcov_config* cfg) const {
    auto set = [&](const std::string& key, const std::string& value) {
      check(aidcov_config_set(cfg, key.c_str(), value.c_str()), key);
    };
    if (dataset) set("paths.dataset", json_string(*dataset));
    if (cache) set("paths.cache", json_string(*cache));
    if (output) set("paths.output", json_string(*output));
    if (seed) set("protocol.seed", std::to_string(*seed));
    if (trials) set("protocol.trials", std::to_string(*trials));
    if (jobs) set("jobs", std::to_string(*jobs));
    if (methods) {
      std::string list = "[";
      std::stringstream ss(*methods);
      std::string item;
      bool first = true;
      while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        list += (first ? "" : ",") + json_string(item);
        first = false;
      }
      set("protocol.methods", list + "]");
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "aidcov: --set expects key=value, got '" << kv << "'\n";
        throw CliFailure{kExitConfig};
      }
      set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  }
};

void load_config(const CommonOptions& opts, ConfigHandle& cfg, bool validate = true) {
  if (opts.config_path.empty()) {
    check(aidcov_config_default(cfg.out()), "default config");
  } else {
    check(aidcov_config_load(opts.config_path.c_str(), cfg.out()), opts.config_path);
  }
  opts.apply(cfg.get());
  if (validate) check(aidcov_config_validate(cfg.get()), "config");
}

std::string config_get(const aidcov_config* cfg, const std::string& key) {
  char* text = nullptr;
  check(aidcov_config_get(cfg, key.c_str(), &text), key);
  std::string value(text);
  aidcov_string_free(text);
  return value;
}

void log_stderr(const char* message, void*) { std::cerr << message << "\n"; }

int cmd_init(const CommonOptions& opts, const std::string& target, bool force) {
  ConfigHandle cfg;
  load_config(opts, cfg);
  if (fs::exists(target) && !force) {
    std::cerr << "aidcov: " << target << " exists (use --force to overwrite)\n";
    return kExitConfig;
  }
  check(aidcov_config_save(cfg.get(), target.c_str()), target);
  if (!opts.quiet) std::cout << "wrote " << target << "\n";
  return kExitOk;
}

int cmd_synth(const CommonOptions& opts, std::string target) {
  ConfigHandle cfg;
  load_config(opts, cfg);
  if (target.empty()) target = config_get(cfg.get(), "paths.dataset");
  if (target.empty()) {
    std::cerr << "aidcov: synth needs a target directory (argument or paths.dataset)\n";
    return kExitConfig;
  }
  DatasetHandle ds;
  check(aidcov_dataset_synth(cfg.get(), ds.out()), "synth");
  check(aidcov_dataset_write(ds.get(), target.c_str()), target);
  if (!opts.quiet) {
    std::cout << "wrote " << aidcov_dataset_sets(ds.get()) << " sets, "
              << aidcov_dataset_images(ds.get()) << " images to " << target << "\n";
  }
  return kExitOk;
}

void load_dataset(const aidcov_config* cfg, DatasetHandle& ds, bool allow_synthetic,
                  bool quiet) {
  const std::string root = config_get(cfg, "paths.dataset");
  if (root.empty()) {
    if (!allow_synthetic) {
      std::cerr << "aidcov: paths.dataset is not set\n";
      throw CliFailure{kExitConfig};
    }
    if (!quiet) std::cerr << "paths.dataset not set; using the synthetic benchmark\n";
    check(aidcov_dataset_synth(cfg, ds.out()), "synth");
    return;
  }
  check(aidcov_dataset_load(root.c_str(), ds.out()), root);
}

int cmd_extract(const CommonOptions& opts) {
  ConfigHandle cfg;
  load_config(opts, cfg);
  const std::string cache = config_get(cfg.get(), "paths.cache");
  if (cache.empty()) {
    std::cerr << "aidcov: paths.cache is not set\n";
    return kExitConfig;
  }
  DatasetHandle ds;
  load_dataset(cfg.get(), ds, false, opts.quiet);
  size_t computed = 0, hits = 0;
  check(aidcov_extract(cfg.get(), ds.get(), cache.c_str(), &computed, &hits), "extract");
  std::cout << "sets: " << aidcov_dataset_sets(ds.get()) << "  computed: " << computed
            << "  cache hits: " << hits << "\n";
  return kExitOk;
}

int cmd_eval(const CommonOptions& opts) {
  ConfigHandle cfg;
  load_config(opts, cfg);
  DatasetHandle ds;
  load_dataset(cfg.get(), ds, true, opts.quiet);
  const std::string cache = config_get(cfg.get(), "paths.cache");
  std::string output = config_get(cfg.get(), "paths.output");
  if (output.empty()) output = ".";
  std::error_code ec;
  fs::create_directories(output, ec);
  if (ec) {
    std::cerr << "aidcov: cannot create " << output << ": " << ec.message() << "\n";
    return kExitConfig;
  }
  ReportHandle report;
  check(aidcov_eval(cfg.get(), ds.get(), cache.c_str(), opts.quiet ? nullptr : log_stderr,
                    nullptr, report.out()),
        "eval");
  const fs::path dir(output);
  check(aidcov_report_write(report.get(), AIDCOV_REPORT_JSON, (dir / "report.json").c_str()),
        "report.json");
  check(aidcov_report_write(report.get(), AIDCOV_REPORT_CSV, (dir / "report.csv").c_str()),
        "report.csv");
  check(aidcov_report_write(report.get(), AIDCOV_REPORT_TEXT, (dir / "report.txt").c_str()),
        "report.txt");
  check(aidcov_report_write_timings(report.get(), (dir / "timings.json").c_str()),
        "timings.json");
  char* table = nullptr;
  check(aidcov_report_format_string(report.get(), AIDCOV_REPORT_TEXT, &table), "report");
  std::cout << table;
  aidcov_string_free(table);
  for (size_t i = 0; i < aidcov_report_warnings(report.get()); ++i) {
    std::cerr << "warning: " << aidcov_report_warning(report.get(), i) << "\n";
  }
  return kExitOk;
}

int cmd_selftest(const CommonOptions& opts) {
  ConfigHandle cfg;
  load_config(opts, cfg);
  const std::uint64_t seed = std::stoull(config_get(cfg.get(), "protocol.seed"));
  SelftestHandle result;
  check(aidcov_selftest_run(seed, result.out()), "selftest");
  size_t failed = 0;
  const size_t n = aidcov_selftest_count(result.get());
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    check(aidcov_selftest_item(result.get(), i, &name, &passed, &detail), "selftest");
    std::cout << (passed ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    if (!passed) ++failed;
  }
  std::cout << (n - failed) << "/" << n << " properties passed\n";
  return failed == 0 ? kExitOk : kExitCompute;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom-embedded covariance descriptors for image-set classification"};
  app.set_version_flag("--version", std::string(aidcov_version()));
  app.require_subcommand(1);

  CommonOptions init_opts, synth_opts, extract_opts, eval_opts, selftest_opts;
  std::string init_target = "config.json";
  bool init_force = false;
  std::string synth_target;

  auto* init = app.add_subcommand("init", "Write a config file with full defaults");
  init_opts.attach(init);
  init->add_option("file", init_target, "Config file to write")->capture_default_str();
  init->add_flag("-f,--force", init_force, "Overwrite an existing file");

  auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark dataset to disk");
  synth_opts.attach(synth);
  synth->add_option("dir", synth_target, "Target directory (default: paths.dataset)");

  auto* extract = app.add_subcommand("extract", "Compute and cache image and set descriptors");
  extract_opts.attach(extract);

  auto* eval = app.add_subcommand("eval", "Run the evaluation protocol and write reports");
  eval_opts.attach(eval);

  auto* selftest = app.add_subcommand("selftest", "Run the embedded invariant suite");
  selftest_opts.attach(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*init) return cmd_init(init_opts, init_target, init_force);
    if (*synth) return cmd_synth(synth_opts, synth_target);
    if (*extract) return cmd_extract(extract_opts);
    if (*eval) return cmd_eval(eval_opts);
    if (*selftest) return cmd_selftest(selftest_opts);
  } catch (const CliFailure& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "aidcov: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitConfig;
}

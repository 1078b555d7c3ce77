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

#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <numbers>
#include <set>
#include <sstream>

#include "classifiers.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace aidcov {

namespace fs = std::filesystem;
using nlohmann::json;

// --- datasets ---------------------------------------------------------------

namespace {

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (directories ? e.is_directory() : (e.is_regular_file() && is_image_file(e.path()))) {
      out.push_back(e.path());
    }
  }
  if (ec) fail(ErrorCode::kIo, dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<ImageSet> load_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) fail(ErrorCode::kIo, root.string() + ": dataset root is not a directory");
  std::vector<ImageSet> sets;
  const auto classes = sorted_entries(root, true);
  if (classes.empty()) fail(ErrorCode::kIo, root.string() + ": dataset has no class directories");
  for (const auto& class_dir : classes) {
    const auto set_dirs = sorted_entries(class_dir, true);
    if (set_dirs.empty()) fail(ErrorCode::kIo, class_dir.string() + ": class has no image sets");
    for (const auto& set_dir : set_dirs) {
      ImageSet set;
      set.label = class_dir.filename().string();
      set.id = set.label + "/" + set_dir.filename().string();
      for (const auto& file : sorted_entries(set_dir, false)) {
        set.images.push_back(read_image(file));
        const auto& first = set.images.front();
        const auto& last = set.images.back();
        if (last.height() != first.height() || last.width() != first.width()) {
          fail(ErrorCode::kIo, file.string() + ": image size differs from the rest of its set");
        }
      }
      if (set.images.empty()) fail(ErrorCode::kIo, set_dir.string() + ": image set is empty");
      sets.push_back(std::move(set));
    }
  }
  return sets;
}

std::vector<ImageSet> synth_dataset(const SyntheticSpec& spec) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, 0x5e7));
  const int k = spec.classes;
  const double size = spec.image_size;
  std::vector<ImageSet> sets;
  for (int c = 0; c < k; ++c) {
    // Class texture: frequency (cycles / pixel) and orientation.
    const double freq = 0.09 + 0.05 * spec.texture_frequency_separation * c;
    const double theta = std::numbers::pi * c / (2.0 * k);
    std::ostringstream label;
    label << "class" << std::setw(2) << std::setfill('0') << c;
    for (int s = 0; s < spec.sets_per_class; ++s) {
      ImageSet set;
      set.label = label.str();
      std::ostringstream sid;
      sid << set.label << "/set" << std::setw(2) << std::setfill('0') << s;
      set.id = sid.str();
      // Viewpoint of the set: rotation and scale offset.
      const double set_rot = rng.uniform(-0.4, 0.4);
      const double set_scale = rng.uniform(0.9, 1.1);
      for (int i = 0; i < spec.images_per_set; ++i) {
        const double t = spec.images_per_set > 1
                             ? static_cast<double>(i) / (spec.images_per_set - 1) - 0.5
                             : 0.0;
        const double rot = theta + set_rot + 0.6 * t;
        const double f = freq * set_scale * (1.0 + 0.2 * t);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double phase2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double cx = std::cos(rot), sx = std::sin(rot);
        Matrix px(spec.image_size, spec.image_size);
        for (int y = 0; y < spec.image_size; ++y) {
          for (int x = 0; x < spec.image_size; ++x) {
            const double u = (x - 0.5 * size) * cx + (y - 0.5 * size) * sx;
            const double v = -(x - 0.5 * size) * sx + (y - 0.5 * size) * cx;
            double val = 0.5 + 0.22 * std::cos(2.0 * std::numbers::pi * f * u + phase) +
                         0.10 * std::cos(2.0 * std::numbers::pi * 0.5 * f * v + phase2);
            val += spec.noise_level * rng.normal();
            px(y, x) = std::clamp(val, 0.0, 1.0);
          }
        }
        set.images.emplace_back(std::move(px));
      }
      sets.push_back(std::move(set));
    }
  }
  return sets;
}

void write_dataset(std::span<const ImageSet> sets, const fs::path& root) {
  for (const auto& set : sets) {
    const fs::path dir = root / set.id;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::kIo, dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < set.images.size(); ++i) {
      std::ostringstream name;
      name << "img" << std::setw(3) << std::setfill('0') << i << ".pgm";
      write_pgm(set.images[i], dir / name.str());
    }
  }
}

// --- guard / stats ------------------------------------------------------------

void LeakageGuard::check_fit(std::span<const std::size_t> origins, const std::string& what) {
  for (std::size_t o : origins) {
    if (o >= is_test_.size() || is_test_[o]) {
      fail(ErrorCode::kLeakage,
           what + ": set #" + std::to_string(o) + " is on the test side of the split");
    }
  }
  ++checked_;
}

std::pair<double, double> mean_std(std::span<const double> values, bool sample_std) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double denom = sample_std ? static_cast<double>(values.size()) - 1.0
                                  : static_cast<double>(values.size());
  return {mean, denom > 0.0 ? std::sqrt(ss / denom) : 0.0};
}

const MethodResult* EvalReport::find(const std::string& method) const {
  for (const auto& m : methods) {
    if (m.name == method) return &m;
  }
  return nullptr;
}

// --- descriptor preparation ---------------------------------------------------

PreparedDataset prepare_dataset(std::span<const ImageSet> data, const Config& config,
                                const PrepareOptions& options) {
  require(!data.empty(), ErrorCode::kInvalidArgument, "dataset is empty");
  PreparedDataset prep;
  std::set<std::string> names;
  for (const auto& s : data) names.insert(s.label);
  prep.class_names.assign(names.begin(), names.end());
  for (const auto& s : data) {
    prep.class_of_set.push_back(static_cast<int>(
        std::lower_bound(prep.class_names.begin(), prep.class_names.end(), s.label) -
        prep.class_names.begin()));
  }
  const std::size_t n = data.size();
  prep.image_logs.resize(n);
  prep.traditional.resize(n);
  prep.traditional_logs.resize(n);
  const std::string hash = config.descriptor_hash();
  const FeatureExtractor extractor(config.feature);
  std::vector<char> hit_covds(n, 0), hit_trad(n, 0);

  parallel_for(n, config.jobs, [&](std::size_t i) {
    const ImageSet& set = data[i];
    if (options.image_covds) {
      const DescriptorCache::Key key{config.dataset_name, set.id, "IMAGE_COVDS", hash};
      std::vector<SpdMatrix> covds;
      if (options.cache) {
        if (auto cached = options.cache->load(key)) {
          for (auto& m : *cached) covds.emplace_back(std::move(m));
          hit_covds[i] = 1;
        }
      }
      if (!hit_covds[i]) {
        covds = image_covds(set, extractor, config.eps);
        if (options.cache) {
          std::vector<Matrix> raw;
          for (const auto& c : covds) raw.push_back(c.data());
          options.cache->store(key, raw,
                               json{{"feature", config.feature}, {"eps", config.eps},
                                    {"images", set.images.size()}});
        }
      }
      prep.image_logs[i] = log_all(covds);
    }
    if (options.traditional) {
      const DescriptorCache::Key key{config.dataset_name, set.id, "TRADITIONAL", hash};
      if (options.cache) {
        if (auto cached = options.cache->load(key)) {
          require(cached->size() == 1, ErrorCode::kIo, "corrupt traditional cache entry for " + set.id);
          prep.traditional[i].emplace(std::move(cached->front()));
          hit_trad[i] = 1;
        }
      }
      if (!hit_trad[i]) {
        prep.traditional[i].emplace(traditional_set_covd(set, config.resize_h, config.resize_w, config.eps));
        if (options.cache) {
          const Matrix raw = prep.traditional[i]->data();
          options.cache->store(key, std::span<const Matrix>(&raw, 1),
                               json{{"resize", {config.resize_h, config.resize_w}},
                                    {"eps", config.eps}, {"images", set.images.size()}});
        }
      }
      prep.traditional_logs[i] = log_matrix(*prep.traditional[i]);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (options.image_covds) (hit_covds[i] ? prep.cache_hits : prep.computed) += 1;
    if (options.traditional) (hit_trad[i] ? prep.cache_hits : prep.computed) += 1;
  }
  if (options.log) {
    options.log("prepared " + std::to_string(n) + " sets (" + std::to_string(prep.computed) +
                " computed, " + std::to_string(prep.cache_hits) + " from cache)");
  }
  return prep;
}

// --- protocol -----------------------------------------------------------------

namespace {

// One family of set descriptors (traditional or AID) with what the
// classifiers need from it.
struct DescriptorView {
  const std::vector<std::optional<SpdMatrix>>* matrices;
  const std::vector<Matrix>* logs;
  // AIRM distances memoised across trials (traditional descriptors only).
  Matrix* airm_memo = nullptr;
};

class Evaluator {
 public:
  Evaluator(const Config& config, const PreparedDataset& prep, LeakageGuard& guard)
      : config_(config), prep_(prep), guard_(guard) {}

  double accuracy(Method method, const DescriptorView& view, std::span<const std::size_t> train,
                  std::span<const std::size_t> test) {
    std::vector<int> train_labels;
    for (std::size_t i : train) train_labels.push_back(prep_.class_of_set[i]);
    std::vector<int> predicted;
    const std::string name = method_name(method);
    switch (method) {
      case Method::kNnAirm:
      case Method::kNnAirmPro: {
        guard_.check_fit(train, name);
        Matrix dist(static_cast<Index>(test.size()), static_cast<Index>(train.size()));
        if (view.airm_memo) {
          fill_memo(view, train, test);
          for (std::size_t t = 0; t < test.size(); ++t) {
            for (std::size_t i = 0; i < train.size(); ++i) {
              dist(static_cast<Index>(t), static_cast<Index>(i)) =
                  (*view.airm_memo)(static_cast<Index>(train[i]), static_cast<Index>(test[t]));
            }
          }
        } else {
          std::vector<AirmAnchor> anchors;
          for (std::size_t i : train) anchors.emplace_back(*(*view.matrices)[i]);
          for (std::size_t t = 0; t < test.size(); ++t) {
            for (std::size_t i = 0; i < train.size(); ++i) {
              dist(static_cast<Index>(t), static_cast<Index>(i)) =
                  anchors[i].distance(*(*view.matrices)[test[t]]);
            }
          }
        }
        predicted = nn_from_distances(dist, train_labels);
        break;
      }
      case Method::kNnLogEd:
      case Method::kNnLogEdPro: {
        guard_.check_fit(train, name);
        Matrix dist(static_cast<Index>(test.size()), static_cast<Index>(train.size()));
        for (std::size_t t = 0; t < test.size(); ++t) {
          for (std::size_t i = 0; i < train.size(); ++i) {
            dist(static_cast<Index>(t), static_cast<Index>(i)) =
                ((*view.logs)[train[i]] - (*view.logs)[test[t]]).norm();
          }
        }
        predicted = nn_from_distances(dist, train_labels);
        break;
      }
      case Method::kCdl:
      case Method::kCdlPro: {
        guard_.check_fit(train, name);
        const Index n = (*view.logs)[train.front()].rows();
        Matrix vectors(n * (n + 1) / 2, static_cast<Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) {
          vectors.col(static_cast<Index>(i)) = logvec_from_log((*view.logs)[train[i]]);
        }
        const CdlModel model = cdl_fit_vectors(vectors, train_labels, config_.classifiers.cdl_ridge);
        for (std::size_t t : test) {
          predicted.push_back(cdl_predict_vector(model, logvec_from_log((*view.logs)[t])));
        }
        break;
      }
      case Method::kLogEksr:
      case Method::kLogEksrPro: {
        guard_.check_fit(train, name);
        std::vector<Matrix> logs;
        for (std::size_t i : train) logs.push_back((*view.logs)[i]);
        SrcModel model = src_fit_logs(std::move(logs), train_labels, config_.classifiers.src_kernel,
                                      config_.classifiers.src_lambda);
        model.options.tolerance = config_.classifiers.src_tolerance;
        model.options.max_sweeps = config_.classifiers.src_max_sweeps;
        for (std::size_t t : test) predicted.push_back(src_decide_log(model, (*view.logs)[t]).label);
        break;
      }
    }
    std::size_t correct = 0;
    for (std::size_t t = 0; t < test.size(); ++t) {
      if (predicted[t] == prep_.class_of_set[test[t]]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(test.size());
  }

 private:
  void fill_memo(const DescriptorView& view, std::span<const std::size_t> train,
                 std::span<const std::size_t> test) {
    Matrix& memo = *view.airm_memo;
    // Anchor = training-side set, so every entry is computed the same way
    // regardless of which trial first needs it.
    std::vector<std::size_t> rows;
    for (std::size_t i : train) {
      for (std::size_t t : test) {
        if (std::isnan(memo(static_cast<Index>(i), static_cast<Index>(t)))) {
          rows.push_back(i);
          break;
        }
      }
    }
    parallel_for(rows.size(), config_.jobs, [&](std::size_t r) {
      const std::size_t i = rows[r];
      const AirmAnchor anchor(*(*view.matrices)[i]);
      for (std::size_t t : test) {
        double& slot = memo(static_cast<Index>(i), static_cast<Index>(t));
        if (std::isnan(slot)) slot = anchor.distance(*(*view.matrices)[t]);
      }
    });
  }

  const Config& config_;
  const PreparedDataset& prep_;
  LeakageGuard& guard_;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Split draw_split(const PreparedDataset& prep, int train_per_class, SplitMix64& rng) {
  Split split;
  for (int c = 0; c < static_cast<int>(prep.class_names.size()); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < prep.class_of_set.size(); ++i) {
      if (prep.class_of_set[i] == c) members.push_back(i);
    }
    shuffle(members, rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      (static_cast<int>(k) < train_per_class ? split.train : split.test).push_back(members[k]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

struct LandmarkDraw {
  std::vector<Matrix> logs;
  std::vector<std::size_t> origins;  // set index of each landmark
};

LandmarkDraw draw_landmarks(const PreparedDataset& prep, std::span<const std::size_t> pool_sets,
                            std::size_t m, SplitMix64& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t s : pool_sets) {
    for (std::size_t k = 0; k < prep.image_logs[s].size(); ++k) pool.emplace_back(s, k);
  }
  LandmarkDraw draw;
  for (std::size_t idx : sample_without_replacement(pool.size(), std::min(m, pool.size()), rng)) {
    draw.logs.push_back(prep.image_logs[pool[idx].first][pool[idx].second]);
    draw.origins.push_back(pool[idx].first);
  }
  return draw;
}

}  // namespace

EvalReport run_protocol(std::span<const ImageSet> data, const Config& config,
                        const DescriptorCache* cache, const LogFn& log) {
  config.validate();
  const Protocol& protocol = config.protocol;
  bool need_pro = false, need_trad = false;
  for (Method m : protocol.methods) (is_proposed(m) ? need_pro : need_trad) = true;

  PrepareOptions popts;
  popts.image_covds = need_pro;
  popts.traditional = need_trad;
  popts.cache = cache;
  popts.log = log;
  const PreparedDataset prep = prepare_dataset(data, config, popts);

  const std::size_t n_sets = data.size();
  const int n_classes = static_cast<int>(prep.class_names.size());
  for (int c = 0; c < n_classes; ++c) {
    const auto count = std::count(prep.class_of_set.begin(), prep.class_of_set.end(), c);
    if (protocol.train_sets_per_class >= count) {
      fail(ErrorCode::kConfig, "protocol.train_sets_per_class=" +
                                   std::to_string(protocol.train_sets_per_class) + " leaves no test set for class '" +
                                   prep.class_names[static_cast<std::size_t>(c)] + "' (" +
                                   std::to_string(count) + " sets)");
    }
  }

  EvalReport report;
  report.dataset = config.dataset_name;
  report.config_hash = config.hash();
  report.seed = protocol.seed;
  report.trials = protocol.trials;
  report.sample_std = protocol.sample_std;
  for (Method m : protocol.methods) {
    MethodResult r;
    r.name = method_name(m);
    report.methods.push_back(std::move(r));
  }

  std::vector<std::optional<SpdMatrix>> trad(prep.traditional);
  Matrix airm_memo = Matrix::Constant(static_cast<Index>(n_sets), static_cast<Index>(n_sets),
                                      std::numeric_limits<double>::quiet_NaN());
  const DescriptorView trad_view{&trad, &prep.traditional_logs, &airm_memo};

  auto fit_nystrom = [&](const LandmarkDraw& draw) {
    const int d = std::min<int>(config.nystrom.target_dim, static_cast<int>(draw.logs.size()));
    NystromModel model = nystrom_fit_logs(draw.logs, config.kernel, d);
    return model;
  };
  auto note = [&](const std::string& w) {
    if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end()) {
      report.warnings.push_back(w);
    }
  };

  std::optional<NystromModel> global_model;
  if (need_pro && !config.nystrom.refit_per_trial) {
    std::vector<std::size_t> all(n_sets);
    std::iota(all.begin(), all.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(derive_seed(protocol.seed, 0xfeed), config.nystrom.seed));
    global_model = fit_nystrom(draw_landmarks(prep, all, config.nystrom.landmarks, rng));
    note("Nystrom model fitted once on landmarks drawn from all sets (refit_per_trial=false); "
         "landmarks may include test-side images");
  }

  for (int trial = 0; trial < protocol.trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(protocol.seed, static_cast<std::uint64_t>(trial));
    SplitMix64 split_rng(trial_seed);
    const Split split = draw_split(prep, protocol.train_sets_per_class, split_rng);
    report.test_sets_per_trial = static_cast<int>(split.test.size());
    std::vector<bool> is_test(n_sets, false);
    for (std::size_t t : split.test) is_test[t] = true;
    LeakageGuard guard(std::move(is_test));
    Evaluator evaluator(config, prep, guard);

    std::vector<std::optional<SpdMatrix>> pro;
    std::vector<Matrix> pro_logs;
    if (need_pro) {
      const NystromModel* model = global_model ? &*global_model : nullptr;
      NystromModel local;
      if (!model) {
        SplitMix64 lm_rng(derive_seed(trial_seed, config.nystrom.seed));
        const LandmarkDraw draw = draw_landmarks(prep, split.train, config.nystrom.landmarks, lm_rng);
        if (draw.logs.size() < static_cast<std::size_t>(config.nystrom.landmarks)) {
          note("training pool has only " + std::to_string(draw.logs.size()) +
               " images; Nystrom M reduced from " + std::to_string(config.nystrom.landmarks));
        }
        try {
          guard.check_fit(draw.origins, "nystrom_fit");
          local = fit_nystrom(draw);
        } catch (const Error& e) {
          fail(e.code(), "trial " + std::to_string(trial) + " (split seed " +
                             std::to_string(trial_seed) + "), nystrom_fit: " + e.what());
        }
        model = &local;
      }
      for (const auto& w : model->warnings) note(w);
      pro.resize(n_sets);
      pro_logs.resize(n_sets);
      parallel_for(n_sets, config.jobs, [&](std::size_t i) {
        pro[i].emplace(aid_covd_from_logs(prep.image_logs[i], *model, config.eps));
        pro_logs[i] = log_matrix(*pro[i]);
      });
    }
    const DescriptorView pro_view{&pro, &pro_logs, nullptr};

    for (std::size_t k = 0; k < protocol.methods.size(); ++k) {
      const Method method = protocol.methods[k];
      const auto start = std::chrono::steady_clock::now();
      double acc = 0.0;
      try {
        acc = evaluator.accuracy(method, is_proposed(method) ? pro_view : trad_view, split.train,
                                 split.test);
      } catch (const Error& e) {
        fail(e.code(), "trial " + std::to_string(trial) + " (split seed " +
                           std::to_string(trial_seed) + "), method " + method_name(method) + ": " +
                           e.what());
      }
      report.methods[k].per_trial.push_back(acc);
      report.methods[k].seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    report.guarded_fits += guard.checked();
    if (log) {
      std::ostringstream os;
      os << "trial " << (trial + 1) << "/" << protocol.trials << ":";
      for (const auto& m : report.methods) os << " " << m.name << "=" << m.per_trial.back();
      log(os.str());
    }
  }
  for (auto& m : report.methods) {
    std::tie(m.mean, m.std) = mean_std(m.per_trial, protocol.sample_std);
  }
  return report;
}

// --- reports --------------------------------------------------------------------

json report_to_json(const EvalReport& r) {
  json methods = json::array();
  for (const auto& m : r.methods) {
    methods.push_back(json{{"name", m.name}, {"mean", m.mean}, {"std", m.std}, {"per_trial", m.per_trial}});
  }
  return json{{"schema", "aidcov.report"},
              {"version", 1},
              {"dataset", r.dataset},
              {"config_hash", r.config_hash},
              {"seed", r.seed},
              {"trials", r.trials},
              {"std_convention", r.sample_std ? "sample" : "population"},
              {"test_sets_per_trial", r.test_sets_per_trial},
              {"guarded_fits", r.guarded_fits},
              {"methods", methods},
              {"warnings", r.warnings}};
}

EvalReport report_from_json(const json& j) {
  try {
    if (j.at("schema") != "aidcov.report" || j.at("version") != 1) {
      fail(ErrorCode::kIo, "unsupported report schema");
    }
    EvalReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<int>();
    r.sample_std = j.at("std_convention").get<std::string>() == "sample";
    r.test_sets_per_trial = j.at("test_sets_per_trial").get<int>();
    r.guarded_fits = j.at("guarded_fits").get<std::size_t>();
    for (const auto& m : j.at("methods")) {
      MethodResult mr;
      mr.name = m.at("name").get<std::string>();
      mr.mean = m.at("mean").get<double>();
      mr.std = m.at("std").get<double>();
      mr.per_trial = m.at("per_trial").get<std::vector<double>>();
      r.methods.push_back(std::move(mr));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, std::string("malformed report JSON: ") + e.what());
  }
}

namespace {

std::string cell(const MethodResult& m) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << m.mean << " ± " << m.std;
  return os.str();
}

}  // namespace

std::string format_table(std::span<const EvalReport> reports) {
  // Rows follow the canonical method order, restricted to methods present.
  std::vector<std::string> rows;
  for (Method m : kAllMethods) {
    for (const auto& r : reports) {
      if (r.find(method_name(m))) {
        rows.emplace_back(method_name(m));
        break;
      }
    }
  }
  std::size_t w0 = std::string("Method").size();
  for (const auto& r : rows) w0 = std::max(w0, r.size());
  std::vector<std::size_t> widths;
  for (const auto& r : reports) {
    std::size_t w = r.dataset.size();
    for (const auto& m : r.methods) w = std::max(w, cell(m).size() - 1);  // "±" is 2 bytes
    widths.push_back(w);
  }
  auto pad = [](const std::string& s, std::size_t w, std::size_t bytes_extra = 0) {
    std::string out = s;
    const std::size_t visible = s.size() - bytes_extra;
    if (visible < w) out.append(w - visible, ' ');
    return out;
  };
  std::ostringstream os;
  os << pad("Method", w0);
  for (std::size_t k = 0; k < reports.size(); ++k) os << " | " << pad(reports[k].dataset, widths[k]);
  os << "\n" << std::string(w0, '-');
  for (std::size_t k = 0; k < reports.size(); ++k) os << "-+-" << std::string(widths[k], '-');
  os << "\n";
  for (const auto& name : rows) {
    os << pad(name, w0);
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const MethodResult* m = reports[k].find(name);
      os << " | " << (m ? pad(cell(*m), widths[k], 1) : pad("-", widths[k]));
    }
    os << "\n";
  }
  return os.str();
}

std::string format_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kJson:
      return report_to_json(report).dump(2) + "\n";
    case ReportFormat::kCsv: {
      std::ostringstream os;
      os << std::setprecision(17) << "method,mean,std";
      for (int t = 0; t < report.trials; ++t) os << ",trial_" << (t + 1);
      os << "\n";
      for (const auto& m : report.methods) {
        os << m.name << "," << m.mean << "," << m.std;
        for (double v : m.per_trial) os << "," << v;
        os << "\n";
      }
      return os.str();
    }
    case ReportFormat::kTextTable:
      return format_table(std::span<const EvalReport>(&report, 1));
  }
  return {};
}

void emit_report(const EvalReport& report, ReportFormat format, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, path.string() + ": cannot open for writing");
  out << format_report(report, format);
  if (!out) fail(ErrorCode::kIo, path.string() + ": write failed");
}

}  // namespace aidcov

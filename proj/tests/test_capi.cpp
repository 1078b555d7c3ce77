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

// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <aidcov/aidcov.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("aidcov_capi_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  aidcov_string_free(s);
  return out;
}

aidcov_spd* diag(std::vector<double> d) {
  const std::size_t n = d.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = d[i];
  aidcov_spd* m = nullptr;
  REQUIRE(aidcov_spd_create(a.data(), n, &m) == AIDCOV_OK);
  return m;
}

aidcov_config* small_config() {
  aidcov_config* c = nullptr;
  REQUIRE(aidcov_config_default(&c) == AIDCOV_OK);
  const char* kv[][2] = {{"synth.classes", "2"},        {"synth.sets_per_class", "3"},
                         {"synth.images_per_set", "4"}, {"synth.image_size", "12"},
                         {"feature.kind", "GRADIENT"},  {"resize", "[6, 6]"},
                         {"nystrom.D", "4"},            {"nystrom.M", "6"},
                         {"protocol.trials", "2"},      {"protocol.train_sets_per_class", "1"},
                         {"jobs", "1"}};
  for (auto& p : kv) REQUIRE(aidcov_config_set(c, p[0], p[1]) == AIDCOV_OK);
  return c;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(aidcov_version()) > 0);
  CHECK(std::string(aidcov_status_name(AIDCOV_OK)) == "OK");
  CHECK(std::string(aidcov_status_name(AIDCOV_ERR_CONFIG)).size() > 0);
}

TEST_CASE("spd handles: create, log, eigenvalues and errors") {
  aidcov_spd* a = diag({1.0, std::exp(2.0)});
  CHECK(aidcov_spd_dim(a) == 2);
  double lg[4];
  REQUIRE(aidcov_spd_log(a, lg) == AIDCOV_OK);
  CHECK(std::abs(lg[0]) < 1e-14);
  CHECK(std::abs(lg[3] - 2.0) < 1e-14);
  double ev[2];
  REQUIRE(aidcov_spd_eigenvalues(a, ev) == AIDCOV_OK);
  CHECK(ev[0] >= ev[1]);

  const double bad[4] = {1.0, 2.0, 2.0, 1.0};  // indefinite
  aidcov_spd* b = nullptr;
  CHECK(aidcov_spd_create(bad, 2, &b) == AIDCOV_ERR_NUMERICAL);
  CHECK(b == nullptr);
  CHECK(std::strlen(aidcov_last_error()) > 0);
  CHECK(aidcov_spd_create(nullptr, 2, &b) == AIDCOV_ERR_INVALID_ARGUMENT);

  const double zero[4] = {0.0, 0.0, 0.0, 1.0};
  REQUIRE(aidcov_spd_regularize(zero, 2, 1e-3, &b) == AIDCOV_OK);
  double data[4];
  REQUIRE(aidcov_spd_data(b, data) == AIDCOV_OK);
  CHECK(std::abs(data[0] - 0.5e-3) < 1e-15);  // eps * tr / n
  aidcov_spd_free(b);

  const double sym[4] = {0.0, 0.0, 0.0, 1.0};
  REQUIRE(aidcov_spd_exp(sym, 2, &b) == AIDCOV_OK);
  REQUIRE(aidcov_spd_data(b, data) == AIDCOV_OK);
  CHECK(std::abs(data[3] - std::exp(1.0)) < 1e-14);
  aidcov_spd_free(b);
  aidcov_spd_free(a);
  aidcov_spd_free(nullptr);
}

TEST_CASE("distances and kernels") {
  aidcov_spd* a = diag({1.0, 1.0});
  aidcov_spd* b = diag({std::exp(1.0), std::exp(-2.0)});
  double d = 0.0;
  REQUIRE(aidcov_airm_distance(a, b, &d) == AIDCOV_OK);
  CHECK(std::abs(d - std::sqrt(5.0)) < 1e-12);
  REQUIRE(aidcov_lem_distance(a, b, &d) == AIDCOV_OK);
  CHECK(std::abs(d - std::sqrt(5.0)) < 1e-12);
  double k = 0.0;
  REQUIRE(aidcov_kernel(nullptr, b, b, &k) == AIDCOV_OK);
  CHECK(std::abs(k - 5.0) < 1e-12);
  REQUIRE(aidcov_kernel(R"({"kind":"LOGE_GAUSS","bandwidth":0.5})", a, b, &k) == AIDCOV_OK);
  CHECK(std::abs(k - std::exp(-2.5)) < 1e-12);
  CHECK(aidcov_kernel("{not json", a, b, &k) == AIDCOV_ERR_CONFIG);
  CHECK(aidcov_kernel(R"({"kind":"NOPE"})", a, b, &k) == AIDCOV_ERR_CONFIG);
  aidcov_spd* c3 = diag({1.0, 2.0, 3.0});
  CHECK(aidcov_lem_distance(a, c3, &d) == AIDCOV_ERR_DIMENSION);

  const aidcov_spd* set[] = {a, b};
  double g[4];
  REQUIRE(aidcov_gram(nullptr, set, 2, g) == AIDCOV_OK);
  CHECK(g[0] == 0.0);
  CHECK(std::abs(g[3] - 5.0) < 1e-12);
  CHECK(g[1] == g[2]);
  aidcov_spd_free(a);
  aidcov_spd_free(b);
  aidcov_spd_free(c3);
}

TEST_CASE("nystrom fit, embed, aid covariance and save/load") {
  std::vector<aidcov_spd*> owned;
  for (int i = 0; i < 6; ++i) {
    owned.push_back(diag({1.0 + i, 2.0 + 0.5 * i * i, 0.5 + 0.1 * i}));
  }
  std::vector<const aidcov_spd*> lm(owned.begin(), owned.end());
  const char* kernel = R"({"kind":"LOGE_POLY","degree":2,"coeffs":[1,1]})";
  aidcov_nystrom* model = nullptr;
  REQUIRE(aidcov_nystrom_fit(kernel, lm.data(), lm.size(), 6, &model) == AIDCOV_OK);
  CHECK(aidcov_nystrom_landmarks(model) == 6);
  const std::size_t dim = aidcov_nystrom_dim(model);
  CHECK(dim >= 1);
  CHECK(dim <= 6);

  // Landmark embeddings reproduce the kernel.
  std::vector<double> z0(dim), z1(dim);
  REQUIRE(aidcov_nystrom_embed(model, lm[0], z0.data()) == AIDCOV_OK);
  REQUIRE(aidcov_nystrom_embed(model, lm[1], z1.data()) == AIDCOV_OK);
  double dot = 0.0;
  for (std::size_t i = 0; i < dim; ++i) dot += z0[i] * z1[i];
  double k01 = 0.0;
  REQUIRE(aidcov_kernel(kernel, lm[0], lm[1], &k01) == AIDCOV_OK);
  CHECK(std::abs(dot - k01) <= 1e-8 * std::abs(k01));

  aidcov_spd* covd = nullptr;
  REQUIRE(aidcov_aid_covd(model, lm.data(), 3, 1e-3, &covd) == AIDCOV_OK);
  CHECK(aidcov_spd_dim(covd) == dim);

  const auto dir = scratch("nystrom");
  const std::string path = (dir / "model.bin").string();
  REQUIRE(aidcov_nystrom_save(model, path.c_str()) == AIDCOV_OK);
  aidcov_nystrom* back = nullptr;
  REQUIRE(aidcov_nystrom_load(path.c_str(), &back) == AIDCOV_OK);
  std::vector<double> zb(aidcov_nystrom_dim(back));
  REQUIRE(zb.size() == dim);
  REQUIRE(aidcov_nystrom_embed(back, lm[0], zb.data()) == AIDCOV_OK);
  CHECK(zb == z0);
  std::ofstream(dir / "junk.bin") << "garbage";
  aidcov_nystrom* junk = nullptr;
  CHECK(aidcov_nystrom_load((dir / "junk.bin").string().c_str(), &junk) == AIDCOV_ERR_IO);

  aidcov_spd* wrong = diag({1.0, 2.0});
  CHECK(aidcov_nystrom_embed(model, wrong, z0.data()) == AIDCOV_ERR_DIMENSION);
  aidcov_nystrom* none = nullptr;
  CHECK(aidcov_nystrom_fit(kernel, lm.data(), 6, 0, &none) != AIDCOV_OK);

  aidcov_spd_free(wrong);
  aidcov_spd_free(covd);
  aidcov_nystrom_free(back);
  aidcov_nystrom_free(model);
  for (auto* m : owned) aidcov_spd_free(m);
}

TEST_CASE("config through the C API") {
  aidcov_config* c = nullptr;
  REQUIRE(aidcov_config_default(&c) == AIDCOV_OK);
  CHECK(aidcov_config_validate(c) == AIDCOV_OK);
  char before[17];
  REQUIRE(aidcov_config_hash(c, before) == AIDCOV_OK);
  CHECK(std::strlen(before) == 16);

  REQUIRE(aidcov_config_set(c, "protocol.trials", "3") == AIDCOV_OK);
  char* v = nullptr;
  REQUIRE(aidcov_config_get(c, "protocol.trials", &v) == AIDCOV_OK);
  CHECK(take(v) == "3");
  REQUIRE(aidcov_config_set(c, "dataset_name", "eth") == AIDCOV_OK);
  REQUIRE(aidcov_config_get(c, "dataset_name", &v) == AIDCOV_OK);
  CHECK(take(v) == "eth");
  char after[17];
  REQUIRE(aidcov_config_hash(c, after) == AIDCOV_OK);
  CHECK(std::string(before) != std::string(after));

  CHECK(aidcov_config_set(c, "no_such_key", "1") == AIDCOV_ERR_CONFIG);
  CHECK(aidcov_config_set(c, "protocol.trials", "\"many\"") == AIDCOV_ERR_CONFIG);
  CHECK(aidcov_config_get(c, "protocol.nothing", &v) == AIDCOV_ERR_CONFIG);
  // A rejected override leaves the config untouched.
  REQUIRE(aidcov_config_get(c, "protocol.trials", &v) == AIDCOV_OK);
  CHECK(take(v) == "3");
  // Values are range-checked by validate (and before any computation).
  REQUIRE(aidcov_config_set(c, "eps", "-1") == AIDCOV_OK);
  CHECK(aidcov_config_validate(c) == AIDCOV_ERR_CONFIG);
  CHECK(std::string(aidcov_last_error()).find("eps") != std::string::npos);
  {
    aidcov_config* small = small_config();
    aidcov_dataset* ds = nullptr;
    REQUIRE(aidcov_dataset_synth(small, &ds) == AIDCOV_OK);
    REQUIRE(aidcov_config_set(small, "eps", "-1") == AIDCOV_OK);
    const auto unused = scratch("never_created") / "cache";
    CHECK(aidcov_extract(small, ds, unused.string().c_str(), nullptr, nullptr) == AIDCOV_ERR_CONFIG);
    CHECK_FALSE(std::filesystem::exists(unused));
    aidcov_report* r = nullptr;
    CHECK(aidcov_eval(small, ds, nullptr, nullptr, nullptr, &r) == AIDCOV_ERR_CONFIG);
    aidcov_dataset_free(ds);
    aidcov_config_free(small);
  }
  REQUIRE(aidcov_config_set(c, "eps", "0.001") == AIDCOV_OK);

  const auto dir = scratch("config");
  const std::string path = (dir / "c.json").string();
  REQUIRE(aidcov_config_save(c, path.c_str()) == AIDCOV_OK);
  aidcov_config* loaded = nullptr;
  REQUIRE(aidcov_config_load(path.c_str(), &loaded) == AIDCOV_OK);
  char h2[17];
  REQUIRE(aidcov_config_hash(loaded, h2) == AIDCOV_OK);
  CHECK(std::string(h2) == std::string(after));
  REQUIRE(aidcov_config_to_json(loaded, &v) == AIDCOV_OK);
  CHECK(take(v).find("\"trials\": 3") != std::string::npos);

  std::ofstream(dir / "neg.json") << R"({"eps": -1})";
  aidcov_config* neg = nullptr;
  REQUIRE(aidcov_config_load((dir / "neg.json").string().c_str(), &neg) == AIDCOV_OK);
  CHECK(aidcov_config_validate(neg) == AIDCOV_ERR_CONFIG);
  aidcov_config_free(neg);
  std::ofstream(dir / "typo.json") << R"({"epsilon": 1})";
  CHECK(aidcov_config_load((dir / "typo.json").string().c_str(), &neg) == AIDCOV_ERR_CONFIG);
  CHECK(aidcov_config_load((dir / "missing.json").string().c_str(), &neg) == AIDCOV_ERR_CONFIG);

  aidcov_config_free(loaded);
  aidcov_config_free(c);
}

TEST_CASE("dataset synth, write, load, extract and eval") {
  aidcov_config* c = small_config();
  aidcov_dataset* ds = nullptr;
  REQUIRE(aidcov_dataset_synth(c, &ds) == AIDCOV_OK);
  CHECK(aidcov_dataset_sets(ds) == 6);
  CHECK(aidcov_dataset_images(ds) == 24);

  const auto dir = scratch("pipeline");
  REQUIRE(aidcov_dataset_write(ds, (dir / "data").string().c_str()) == AIDCOV_OK);
  aidcov_dataset* loaded = nullptr;
  REQUIRE(aidcov_dataset_load((dir / "data").string().c_str(), &loaded) == AIDCOV_OK);
  CHECK(aidcov_dataset_sets(loaded) == 6);

  const std::string cache = (dir / "cache").string();
  std::size_t computed = 0, hits = 0;
  REQUIRE(aidcov_extract(c, loaded, cache.c_str(), &computed, &hits) == AIDCOV_OK);
  CHECK(computed == 12);
  CHECK(hits == 0);
  REQUIRE(aidcov_extract(c, loaded, cache.c_str(), &computed, &hits) == AIDCOV_OK);
  CHECK(computed == 0);
  CHECK(hits == 12);

  int lines = 0;
  auto log = [](const char*, void* user) { ++*static_cast<int*>(user); };
  aidcov_report* r1 = nullptr;
  REQUIRE(aidcov_eval(c, loaded, cache.c_str(), log, &lines, &r1) == AIDCOV_OK);
  CHECK(lines > 0);
  CHECK(aidcov_report_methods(r1) == 8);
  const char* name = nullptr;
  double mean = -1.0, sd = -1.0;
  REQUIRE(aidcov_report_method(r1, 0, &name, &mean, &sd) == AIDCOV_OK);
  CHECK(std::string(name) == "NN-AIRM");
  CHECK(mean >= 0.0);
  CHECK(mean <= 100.0);
  CHECK(aidcov_report_method(r1, 8, &name, &mean, &sd) == AIDCOV_ERR_INVALID_ARGUMENT);

  aidcov_report* r2 = nullptr;
  REQUIRE(aidcov_eval(c, ds, nullptr, nullptr, nullptr, &r2) == AIDCOV_OK);
  char* j1 = nullptr;
  char* j2 = nullptr;
  REQUIRE(aidcov_report_format_string(r1, AIDCOV_REPORT_JSON, &j1) == AIDCOV_OK);
  REQUIRE(aidcov_report_format_string(r2, AIDCOV_REPORT_JSON, &j2) == AIDCOV_OK);
  // Written and re-read PGMs are quantised, so compare structure only here.
  CHECK(take(j1).find("\"schema\": \"aidcov.report\"") != std::string::npos);
  take(j2);

  REQUIRE(aidcov_report_write(r1, AIDCOV_REPORT_CSV, (dir / "r.csv").string().c_str()) == AIDCOV_OK);
  REQUIRE(aidcov_report_write_timings(r1, (dir / "t.json").string().c_str()) == AIDCOV_OK);
  CHECK(std::filesystem::file_size(dir / "r.csv") > 0);
  const std::string unwritable = (dir / "r.csv" / "r.txt").string();  // parent is a file
  CHECK(aidcov_report_write(r1, AIDCOV_REPORT_TEXT, unwritable.c_str()) == AIDCOV_ERR_IO);

  REQUIRE(aidcov_config_set(c, "protocol.methods", "[\"NN-LogED\"]") == AIDCOV_OK);
  aidcov_report* r3 = nullptr;
  REQUIRE(aidcov_eval(c, ds, nullptr, nullptr, nullptr, &r3) == AIDCOV_OK);
  CHECK(aidcov_report_methods(r3) == 1);

  REQUIRE(aidcov_config_set(c, "protocol.train_sets_per_class", "3") == AIDCOV_OK);
  aidcov_report* r4 = nullptr;
  CHECK(aidcov_eval(c, ds, nullptr, nullptr, nullptr, &r4) == AIDCOV_ERR_CONFIG);
  CHECK(r4 == nullptr);

  aidcov_dataset* missing = nullptr;
  CHECK(aidcov_dataset_load((dir / "nope").string().c_str(), &missing) == AIDCOV_ERR_IO);

  aidcov_report_free(r3);
  aidcov_report_free(r2);
  aidcov_report_free(r1);
  aidcov_dataset_free(loaded);
  aidcov_dataset_free(ds);
  aidcov_config_free(c);
}

TEST_CASE("eval is byte-for-byte deterministic") {
  aidcov_config* c = small_config();
  aidcov_dataset* ds = nullptr;
  REQUIRE(aidcov_dataset_synth(c, &ds) == AIDCOV_OK);
  std::string out[2];
  for (auto& s : out) {
    aidcov_report* r = nullptr;
    REQUIRE(aidcov_eval(c, ds, nullptr, nullptr, nullptr, &r) == AIDCOV_OK);
    char* j = nullptr;
    REQUIRE(aidcov_report_format_string(r, AIDCOV_REPORT_JSON, &j) == AIDCOV_OK);
    s = take(j);
    aidcov_report_free(r);
  }
  CHECK(out[0] == out[1]);
  aidcov_dataset_free(ds);
  aidcov_config_free(c);
}

TEST_CASE("selftest through the C API") {
  aidcov_selftest* st = nullptr;
  REQUIRE(aidcov_selftest_run(2018, &st) == AIDCOV_OK);
  REQUIRE(aidcov_selftest_count(st) >= 9);
  for (std::size_t i = 0; i < aidcov_selftest_count(st); ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    REQUIRE(aidcov_selftest_item(st, i, &name, &passed, &detail) == AIDCOV_OK);
    INFO(name << ": " << detail);
    CHECK(passed == 1);
  }
  // Same seed, same report.
  aidcov_selftest* again = nullptr;
  REQUIRE(aidcov_selftest_run(2018, &again) == AIDCOV_OK);
  REQUIRE(aidcov_selftest_count(again) == aidcov_selftest_count(st));
  for (std::size_t i = 0; i < aidcov_selftest_count(st); ++i) {
    const char *n1, *n2, *d1, *d2;
    int p1 = 0, p2 = 0;
    REQUIRE(aidcov_selftest_item(st, i, &n1, &p1, &d1) == AIDCOV_OK);
    REQUIRE(aidcov_selftest_item(again, i, &n2, &p2, &d2) == AIDCOV_OK);
    CHECK(std::string(n1) == n2);
    CHECK(std::string(d1) == d2);
  }
  aidcov_selftest_free(again);
  aidcov_selftest_free(st);
}

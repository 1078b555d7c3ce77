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

#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "classifiers.hpp"
#include "error.hpp"
#include "features.hpp"
#include "metrics.hpp"
#include "nystrom.hpp"
#include "sampling.hpp"

namespace aidcov {

namespace {

std::string worst(const char* what, double value, double tol) {
  std::ostringstream os;
  os << what << " " << std::scientific << std::setprecision(2) << value << " (tol "
     << tol << ")";
  return os.str();
}

SelfTestResult check(const std::string& name, double value, double tol, const char* what) {
  return {name, value <= tol, worst(what, value, tol)};
}

}  // namespace

std::vector<SelfTestResult> run_selftest(std::uint64_t seed) {
  std::vector<SelfTestResult> out;
  SplitMix64 rng(derive_seed(seed, 0x5e1f));

  auto guarded = [&](const std::string& name, const std::function<SelfTestResult()>& body) {
    try {
      out.push_back(body());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };

  guarded("log/exp roundtrip", [&] {
    double err = 0.0;
    for (int t = 0; t < 40; ++t) {
      const SpdMatrix a = random_spd(rng, 2 + static_cast<Index>(rng.below(9)), 6.0);
      const SpdMatrix back = exp_sym(log_spd(a));
      err = std::max(err, (back.data() - a.data()).norm() / a.data().norm());
    }
    return check("log/exp roundtrip", err, 1e-9, "max relative error");
  });

  guarded("AIRM metric axioms", [&] {
    double err = 0.0;
    for (int t = 0; t < 30; ++t) {
      const Index n = 2 + static_cast<Index>(rng.below(7));
      const SpdMatrix a = random_spd(rng, n, 3.0), b = random_spd(rng, n, 3.0),
                      c = random_spd(rng, n, 3.0);
      const double ab = airm_dist(a, b), ba = airm_dist(b, a);
      err = std::max({err, std::abs(ab - ba), airm_dist(a, a),
                      ab - airm_dist(a, c) - airm_dist(c, b)});
    }
    return check("AIRM metric axioms", err, 1e-8, "max violation");
  });

  guarded("AIRM affine invariance", [&] {
    double err = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Index n = 2 + static_cast<Index>(rng.below(6));
      const SpdMatrix a = random_spd(rng, n, 2.0), b = random_spd(rng, n, 2.0);
      const Matrix w = random_spd(rng, n, 1.0).data() * random_orthogonal(rng, n);
      const SpdMatrix wa = make_spd(w * a.data() * w.transpose(), 0.0);
      const SpdMatrix wb = make_spd(w * b.data() * w.transpose(), 0.0);
      const double d = airm_dist(a, b);
      err = std::max(err, std::abs(airm_dist(wa, wb) - d) / std::max(d, 1e-300));
    }
    return check("AIRM affine invariance", err, 1e-6, "max relative error");
  });

  guarded("LEM polarization", [&] {
    double err = 0.0;
    for (int t = 0; t < 30; ++t) {
      const Index n = 2 + static_cast<Index>(rng.below(7));
      const SpdMatrix a = random_spd(rng, n, 3.0), b = random_spd(rng, n, 3.0);
      const double d = lem_dist(a, b);
      err = std::max(err, std::abs(d * d - (loge_inner(a, a) + loge_inner(b, b) -
                                            2.0 * loge_inner(a, b))));
    }
    return check("LEM polarization", err, 1e-8, "max error");
  });

  guarded("Gram PSD (all kernel kinds)", [&] {
    const KernelSpec specs[] = {KernelSpec::linear(), KernelSpec::poly(2, {1.0, 1.0}),
                                KernelSpec::exp(1, {0.2}), KernelSpec::gauss(0.5)};
    double worst_ratio = 0.0;
    for (const auto& spec : specs) {
      for (int t = 0; t < 5; ++t) {
        std::vector<SpdMatrix> set;
        const Index n = 2 + static_cast<Index>(rng.below(4));
        const int m = 2 + static_cast<int>(rng.below(29));
        for (int i = 0; i < m; ++i) set.push_back(random_spd(rng, n, 1.0));
        const GramMatrix g = gram(spec, set);
        const EigenPair e = sym_eig(g.data);
        worst_ratio = std::max(worst_ratio, -e.values(e.values.size() - 1) / e.values(0));
      }
    }
    return check("Gram PSD (all kernel kinds)", std::max(worst_ratio, 0.0), 1e-8,
                 "max -lambda_min/lambda_max");
  });

  guarded("Nystrom exactness", [&] {
    std::vector<SpdMatrix> set;
    for (int i = 0; i < 12; ++i) set.push_back(random_spd(rng, 4, 2.0));
    const NystromModel model = nystrom_fit(set, KernelSpec::linear(), 10);
    const Matrix k = gram(KernelSpec::linear(), set).data;
    const Matrix z = nystrom_batch_embed(model, set);
    // Rank of the linear Gram on 4x4 logs is at most 10, so D = 10 is exact.
    return check("Nystrom exactness", (z.transpose() * z - k).norm() / k.norm(), 1e-8,
                 "relative reconstruction error");
  });

  guarded("Nystrom truncation tail", [&] {
    std::vector<SpdMatrix> set;
    for (int i = 0; i < 15; ++i) set.push_back(random_spd(rng, 3, 2.0));
    const KernelSpec spec = KernelSpec::gauss(0.5);
    const Matrix k = gram(spec, set).data;
    const EigenPair full = sym_eig(k);
    double err = 0.0;
    for (int d = 1; d < 15; ++d) {
      const NystromModel model = nystrom_fit(set, spec, d);
      const Matrix z = nystrom_landmark_embedding(model);
      const double tail = full.values.tail(15 - d).norm();
      err = std::max(err, std::abs((z.transpose() * z - k).norm() - tail));
    }
    return check("Nystrom truncation tail", err, 1e-8, "max |error - tail norm|");
  });

  guarded("logvec isometry", [&] {
    double err = 0.0;
    for (int t = 0; t < 30; ++t) {
      const Index n = 2 + static_cast<Index>(rng.below(9));
      const SpdMatrix a = random_spd(rng, n, 2.0), b = random_spd(rng, n, 2.0);
      err = std::max(err, std::abs(logvec(a).dot(logvec(b)) - loge_inner(a, b)));
    }
    return check("logvec isometry", err, 1e-10, "max error");
  });

  guarded("centering projection", [&] {
    double err = 0.0;
    for (Index p = 1; p <= 20; ++p) {
      const Matrix j = centering_matrix(p);
      const Matrix x = static_cast<double>(p) * j * j.transpose();
      err = std::max({err, (x * x - x).cwiseAbs().maxCoeff(),
                      (j * j.transpose() * Vector::Ones(p)).cwiseAbs().maxCoeff()});
    }
    return check("centering projection", err, 1e-12, "max error");
  });

  return out;
}

}  // namespace aidcov

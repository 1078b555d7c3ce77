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
#include <vector>

namespace aidcov {

// SplitMix64. Counter based, so a (seed, stream) pair fully determines every
// draw on every platform. std::*_distribution is avoided on purpose: their
// outputs are implementation defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller; the spare value is cached.
  double normal();

  // Independent child generator; the parent advances by one draw.
  SplitMix64 split() { return SplitMix64(mix(next())); }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Seed for a named sub-stream, e.g. derive_seed(protocol_seed, trial).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& rng);

}  // namespace aidcov

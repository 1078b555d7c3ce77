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

#include "random.hpp"
#include "spd.hpp"

namespace aidcov {

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed by
// the diagonal of R).
Matrix random_orthogonal(SplitMix64& rng, Index n);

// Q diag(10^u_i) Q^T with u_i uniform in [-log10_cond/2, log10_cond/2], so the
// condition number is at most 10^log10_cond.
SpdMatrix random_spd(SplitMix64& rng, Index n, double log10_cond = 2.0);

// exp of a random symmetric matrix with entries ~ N(center, scale^2).
SymMatrix random_sym(SplitMix64& rng, Index n, double scale = 1.0);

}  // namespace aidcov

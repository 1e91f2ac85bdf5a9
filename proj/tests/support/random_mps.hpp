// Copyright 2026 The mpsim Authors
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

#include <algorithm>
#include <random>
#include <vector>

#include "mpsim/mps.hpp"

namespace mpsim::testing {

/// Normalized MPS with Gaussian tensors, bonds min(chi, 2^L, 2^(N-L)).
inline Mps random_mps(std::size_t n, std::size_t chi, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Mps::SiteTensor> sites(n);
  auto bond = [&](std::size_t b) -> Eigen::Index {
    if (b == 0 || b == n) return 1;
    const std::size_t cap = std::min<std::size_t>(b, n - b);
    return static_cast<Eigen::Index>(
        std::min<std::size_t>(chi, cap >= 20 ? chi : (std::size_t{1} << cap)));
  };
  for (std::size_t i = 0; i < n; ++i)
    for (auto& m : sites[i]) {
      m.resize(bond(i), bond(i + 1));
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = cplx(g(rng), g(rng));
    }
  return normalize(Mps(std::move(sites)));
}

}  // namespace mpsim::testing

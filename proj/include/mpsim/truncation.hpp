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
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <variant>

#include <Eigen/Core>

namespace mpsim {

/// Contract the operator into the state exactly on its support, then cut
/// every bond back with a canonical SVD sweep.
struct ZipUp {};

/// ZipUp followed by two-site fitting sweeps maximizing
/// |<phi|O|psi>|^2 / <phi|phi>. `sweeps` counts half sweeps (one direction).
struct Variational {
  int sweeps = 2;
  double tolerance = 1e-10;
};

using ApplicationMethod = std::variant<ZipUp, Variational>;

/// Singular values below this fraction of the largest one at a bond are
/// rounding noise and are always dropped.
inline constexpr double kSingularValueFloor = 1e-13;

struct TruncationPolicy {
  static constexpr std::size_t kUnbounded =
      std::numeric_limits<std::size_t>::max();

  std::size_t chi_max = kUnbounded;
  double weight_cutoff = 0.0;
  ApplicationMethod method = Variational{};

  static TruncationPolicy exact() { return TruncationPolicy{}; }
  static TruncationPolicy with_chi(std::size_t chi) {
    TruncationPolicy p;
    p.chi_max = chi;
    return p;
  }

  void validate() const {
    if (chi_max < 1) throw std::invalid_argument("chi_max must be >= 1");
    if (!(weight_cutoff >= 0.0))
      throw std::invalid_argument("weight_cutoff must be >= 0");
    if (const auto* v = std::get_if<Variational>(&method); v && v->sweeps < 1)
      throw std::invalid_argument("variational sweeps must be >= 1");
  }
};

/// Number of singular values to keep. `s` is sorted in descending order.
template <typename Derived>
std::size_t kept_count(const Eigen::MatrixBase<Derived>& s,
                       const TruncationPolicy& policy) {
  const auto n = static_cast<std::size_t>(s.size());
  if (n == 0) return 0;
  const double largest = static_cast<double>(s(0));
  std::size_t keep = 0;
  while (keep < n &&
         static_cast<double>(s(static_cast<Eigen::Index>(keep))) >
             kSingularValueFloor * largest)
    ++keep;
  keep = std::max<std::size_t>(1, std::min(keep, policy.chi_max));

  if (policy.weight_cutoff > 0.0) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      total += static_cast<double>(s(i)) * static_cast<double>(s(i));
    double tail = 0.0;
    for (Eigen::Index i = static_cast<Eigen::Index>(keep); i < s.size(); ++i)
      tail += static_cast<double>(s(i)) * static_cast<double>(s(i));
    while (keep > 1) {
      const double v = static_cast<double>(s(static_cast<Eigen::Index>(keep - 1)));
      if (tail + v * v > policy.weight_cutoff * total) break;
      tail += v * v;
      --keep;
    }
  }
  return keep;
}

}  // namespace mpsim

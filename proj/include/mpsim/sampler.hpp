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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpsim/mps.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

/// Outcome counts keyed by bitstring ('0'/'1', qubit 0 first).
class Histogram {
 public:
  explicit Histogram(std::size_t n_bits = 0) : n_bits_(n_bits) {}

  std::size_t n_bits() const noexcept { return n_bits_; }
  std::uint64_t total() const noexcept { return total_; }
  const std::map<std::string, std::uint64_t>& counts() const noexcept { return counts_; }
  bool empty() const noexcept { return total_ == 0; }

  void add(const std::string& bits, std::uint64_t count = 1);
  void merge(const Histogram& other);
  std::uint64_t count(const std::string& bits) const;
  double frequency(const std::string& bits) const;

 private:
  std::size_t n_bits_;
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

std::string to_bitstring(std::uint64_t value, std::size_t n_bits);
std::uint64_t from_bitstring(const std::string& bits);

struct Sample {
  std::vector<int> bits;
  /// Product of the conditional probabilities along the path.
  double probability = 1.0;
};

/// Draws from |amplitude|^2 by sweeping left to right over a right-canonical
/// copy of the state, one conditional distribution per qubit.
class MpsSampler {
 public:
  explicit MpsSampler(const Mps& state);

  std::size_t n_qubits() const noexcept { return state_.size(); }

  /// Samples the first `sites` qubits (all qubits when omitted) from their
  /// exact marginal distribution.
  Sample draw(Rng& rng, std::optional<std::size_t> sites = std::nullopt) const;

 private:
  Mps state_;
};

Sample sample_one(const Mps& state, Rng& rng);

/// Samples are drawn in fixed chunks with one derived stream per chunk, so
/// the histogram is independent of the worker count. Advances `rng` once.
Histogram sample_histogram(const Mps& state, std::uint64_t n_samples, Rng& rng,
                           std::optional<std::size_t> sites = std::nullopt,
                           unsigned workers = 1);

/// Columns: bitstring,count,frequency.
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace mpsim

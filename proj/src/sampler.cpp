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

#include "mpsim/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace mpsim {

void Histogram::add(const std::string& bits, std::uint64_t count) {
  if (bits.size() != n_bits_)
    throw std::invalid_argument("histogram key '" + bits + "' has wrong length");
  counts_[bits] += count;
  total_ += count;
}

void Histogram::merge(const Histogram& other) {
  if (other.n_bits_ != n_bits_) throw std::invalid_argument("histogram width mismatch");
  for (const auto& [k, v] : other.counts_) add(k, v);
}

std::uint64_t Histogram::count(const std::string& bits) const {
  auto it = counts_.find(bits);
  return it == counts_.end() ? 0 : it->second;
}

double Histogram::frequency(const std::string& bits) const {
  return total_ ? static_cast<double>(count(bits)) / static_cast<double>(total_) : 0.0;
}

std::string to_bitstring(std::uint64_t value, std::size_t n_bits) {
  std::string s(n_bits, '0');
  for (std::size_t i = 0; i < n_bits; ++i)
    if ((value >> (n_bits - 1 - i)) & 1u) s[i] = '1';
  return s;
}

std::uint64_t from_bitstring(const std::string& bits) {
  if (bits.size() > 64) throw std::invalid_argument("bitstring longer than 64 bits");
  std::uint64_t v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring '" + bits + "'");
    v = (v << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return v;
}

MpsSampler::MpsSampler(const Mps& state) : state_(canonicalize(state, 0)) {
  state_ = normalize(std::move(state_));
}

Sample MpsSampler::draw(Rng& rng, std::optional<std::size_t> sites) const {
  const std::size_t n = sites.value_or(state_.size());
  if (n > state_.size()) throw std::invalid_argument("sample prefix longer than register");
  Sample out;
  out.bits.reserve(n);
  Eigen::RowVectorXcd env = Eigen::RowVectorXcd::Ones(1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = state_.site(i);
    Eigen::RowVectorXcd v0 = env * a[0];
    Eigen::RowVectorXcd v1 = env * a[1];
    const double p0 = v0.squaredNorm(), p1 = v1.squaredNorm();
    if (!(std::abs(p0 + p1 - 1.0) < 1e-6))
      throw NumericalFailure("conditional distribution at qubit " + std::to_string(i) +
                             " sums to " + std::to_string(p0 + p1));
    const int bit = rng.uniform() * (p0 + p1) < p0 ? 0 : 1;
    const double p = bit ? p1 : p0;
    out.probability *= p / (p0 + p1);
    env = (bit ? v1 : v0) / std::sqrt(p);
    out.bits.push_back(bit);
  }
  return out;
}

Sample sample_one(const Mps& state, Rng& rng) { return MpsSampler(state).draw(rng); }

Histogram sample_histogram(const Mps& state, std::uint64_t n_samples, Rng& rng,
                           std::optional<std::size_t> sites, unsigned workers) {
  if (n_samples == 0) throw std::invalid_argument("need at least one sample");
  const MpsSampler sampler(state);
  const std::size_t width = sites.value_or(state.size());
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  const Rng base(rng.next_u64());
  std::vector<Histogram> parts(n_chunks, Histogram(width));

  auto run_chunk = [&](std::uint64_t c) {
    Rng stream = base.split(c);
    const std::uint64_t count = std::min(kChunk, n_samples - c * kChunk);
    std::string key(width, '0');
    for (std::uint64_t s = 0; s < count; ++s) {
      const auto sample = sampler.draw(stream, sites);
      for (std::size_t i = 0; i < width; ++i) key[i] = sample.bits[i] ? '1' : '0';
      parts[c].add(key);
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t c; (c = next++) < n_chunks;) run_chunk(c);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Histogram h(width);
  for (const auto& p : parts) h.merge(p);
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bitstring,count,frequency\n";
  for (const auto& [k, v] : h.counts()) out << k << ',' << v << ',' << h.frequency(k) << '\n';
}

}  // namespace mpsim

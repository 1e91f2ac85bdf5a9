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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "mpsim/circuit.hpp"

namespace mpsim {

// ---------------------------------------------------------------------------
// Fourier transforms

Circuit build_qft(std::size_t n_qubits, QftOptions options) {
  Circuit c(n_qubits);
  for (std::size_t j = 0; j < n_qubits; ++j) {
    c.add(h_gate(j));
    for (std::size_t k = 2; j + k - 1 < n_qubits; ++k) {
      if (options.cutoff > 0 && static_cast<int>(k) > options.cutoff) break;
      c.add(controlled(rk_gate(static_cast<int>(k), j), {j + k - 1}));
    }
  }
  if (options.final_swaps)
    for (std::size_t j = 0; j < n_qubits / 2; ++j)
      c.add(swap_gate(j, n_qubits - 1 - j));
  return c;
}

Circuit build_aqft(std::size_t n_qubits, int l, bool final_swaps) {
  if (l < 2) throw std::invalid_argument("AQFT cutoff must be >= 2");
  return build_qft(n_qubits, {l, final_swaps});
}

// ---------------------------------------------------------------------------
// Random states

Matrix2 haar_unitary(Rng& rng) {
  Matrix2 z;
  for (int i = 0; i < 4; ++i) z(i / 2, i % 2) = cplx(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Matrix2> qr(z);
  Matrix2 q = qr.householderQ();
  const Matrix2 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

Circuit build_random_state_circuit(std::size_t n_qubits, std::size_t depth,
                                   std::uint64_t seed) {
  if (n_qubits < 2) throw std::invalid_argument("random circuit needs >= 2 qubits");
  Rng rng(seed);
  Circuit c(n_qubits);
  std::size_t entangling = 0;
  for (std::size_t layer = 0; layer < depth; ++layer) {
    if (layer % 2 == 0) {
      for (std::size_t q = 0; q < n_qubits; ++q) c.add(unitary_gate(haar_unitary(rng), q));
    } else {
      for (std::size_t q = entangling % 2; q + 1 < n_qubits; q += 2)
        c.add(controlled(x_gate(q + 1), {q}));
      ++entangling;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Grover

GroverProblem::GroverProblem(std::size_t n, std::vector<std::uint64_t> items)
    : n_qubits(n), marked(std::move(items)) {
  if (n == 0 || n > 62) throw std::invalid_argument("Grover register size out of range");
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (marked.empty()) throw std::invalid_argument("no marked items");
  if (marked.size() >= dim) throw std::invalid_argument("need m < n");
  std::unordered_set<std::uint64_t> seen;
  for (auto w : marked) {
    if (w >= dim) throw std::invalid_argument("marked item outside the register");
    if (!seen.insert(w).second) throw std::invalid_argument("duplicate marked item");
  }
}

double GroverProblem::alpha() const {
  return std::asin(std::sqrt(static_cast<double>(m()) / n_items()));
}

GroverProblem GroverProblem::random(std::size_t n_qubits, std::size_t m, Rng& rng) {
  if (n_qubits == 0 || n_qubits > 62) throw std::invalid_argument("register size");
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  if (m == 0 || m >= dim) throw std::invalid_argument("need 1 <= m < n");
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> items;
  while (items.size() < m) {
    const auto w = rng.below(dim);
    if (seen.insert(w).second) items.push_back(w);
  }
  return GroverProblem(n_qubits, std::move(items));
}

namespace {

// Phase flip on |1...1> of `qubits`, optionally with extra controls.
Gate all_ones_flip(const std::vector<std::size_t>& qubits,
                   std::vector<std::size_t> extra) {
  std::vector<std::size_t> controls(qubits.begin(), qubits.end() - 1);
  controls.insert(controls.end(), extra.begin(), extra.end());
  if (controls.empty()) return z_gate(qubits.back());
  return controlled(z_gate(qubits.back()), std::move(controls));
}

void add_oracle(Circuit& c, const GroverProblem& p, std::size_t offset,
                const std::vector<std::size_t>& extra) {
  const std::size_t n = p.n_qubits;
  std::vector<std::size_t> reg(n);
  std::iota(reg.begin(), reg.end(), offset);
  for (auto w : p.marked) {
    std::vector<std::size_t> zeros;
    for (std::size_t q = 0; q < n; ++q)
      if (((w >> (n - 1 - q)) & 1u) == 0) zeros.push_back(offset + q);
    for (auto q : zeros) c.add(x_gate(q));
    c.add(all_ones_flip(reg, extra));
    for (auto q : zeros) c.add(x_gate(q));
  }
}

void add_diffuser(Circuit& c, std::size_t n, std::size_t offset,
                  const std::vector<std::size_t>& extra) {
  std::vector<std::size_t> reg(n);
  std::iota(reg.begin(), reg.end(), offset);
  for (auto q : reg) c.add(h_gate(q));
  for (auto q : reg) c.add(x_gate(q));
  c.add(all_ones_flip(reg, extra));
  for (auto q : reg) c.add(x_gate(q));
  for (auto q : reg) c.add(h_gate(q));
}

}  // namespace

Circuit build_grover_oracle(const GroverProblem& p) {
  Circuit c(p.n_qubits);
  add_oracle(c, p, 0, {});
  return c;
}

Circuit build_grover_diffuser(std::size_t n_qubits) {
  Circuit c(n_qubits);
  add_diffuser(c, n_qubits, 0, {});
  return c;
}

Circuit build_grover_iteration(const GroverProblem& p) {
  Circuit c(p.n_qubits);
  add_oracle(c, p, 0, {});
  add_diffuser(c, p.n_qubits, 0, {});
  c.add(unitary_gate(-Matrix2::Identity(), 0));
  return c;
}

Circuit build_grover_circuit(const GroverProblem& p, std::size_t r) {
  Circuit c(p.n_qubits);
  c.mark("superposition");
  for (std::size_t q = 0; q < p.n_qubits; ++q) c.add(h_gate(q));
  const Circuit iteration = build_grover_iteration(p);
  for (std::size_t i = 0; i < r; ++i) {
    c.mark("iteration " + std::to_string(i + 1));
    c.append(iteration);
  }
  return c;
}

std::size_t optimal_iterations(double n, double m) {
  if (!(m >= 1) || !(m < n)) throw std::invalid_argument("optimal_iterations: need 1 <= m < n");
  return static_cast<std::size_t>(std::ceil(std::numbers::pi / 4 * std::sqrt(n / m)));
}

// The X and H layers around each flip cancel when the control is |0>, so only
// the flips need the extra control. The global sign becomes Z on the control.
Circuit build_controlled_grover(std::size_t total_qubits, std::size_t control,
                                std::size_t offset, const GroverProblem& p) {
  if (control >= offset && control < offset + p.n_qubits)
    throw std::invalid_argument("control qubit inside the Grover register");
  Circuit c(total_qubits);
  add_oracle(c, p, offset, {control});
  add_diffuser(c, p.n_qubits, offset, {control});
  c.add(z_gate(control));
  return c;
}

Circuit build_counting_prefix(std::size_t n_top, const GroverProblem& p) {
  if (n_top < 1) throw std::invalid_argument("counting needs >= 1 readout qubit");
  if (n_top > 20) throw std::invalid_argument("readout register too large");
  const std::size_t total = n_top + p.n_qubits;
  Circuit c(total);
  c.mark("superposition");
  for (std::size_t q = 0; q < total; ++q) c.add(h_gate(q));
  c.mark("controlled Grover");
  for (std::size_t j = 0; j < n_top; ++j) {
    const Circuit block = build_controlled_grover(total, j, n_top, p);
    const std::size_t reps = std::size_t{1} << (n_top - 1 - j);
    for (std::size_t r = 0; r < reps; ++r) c.append(block);
  }
  return c;
}

Circuit build_counting_circuit(std::size_t n_top, const GroverProblem& p,
                               CountingOptions options) {
  Circuit c = build_counting_prefix(n_top, p);
  const Circuit qft = options.aqft_cutoff > 0
                          ? build_aqft(n_top, options.aqft_cutoff)
                          : build_qft(n_top);
  c.mark("inverse QFT");
  c.append(invert(qft));
  return c;
}

}  // namespace mpsim

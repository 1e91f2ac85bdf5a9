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

#include <vector>

#include "mpsim/circuit.hpp"

namespace mpsim {

Mpo gate_mpo(const Gate& g, std::size_t n_qubits) {
  if (g.kind == GateKind::Swap) return swap_mpo(n_qubits, g.target, g.target2);
  if (g.controls.empty())
    throw std::invalid_argument("gate_mpo: single-qubit gates are applied directly");
  return controlled_mpo(n_qubits, std::span<const std::size_t>(g.controls),
                        g.target, g.unitary());
}

RunResult run_circuit(Mps state, const Circuit& c, const TruncationPolicy& policy,
                      bool record_entropy) {
  policy.validate();
  if (state.size() != c.n_qubits())
    throw std::invalid_argument("run_circuit: circuit acts on " +
                                std::to_string(c.n_qubits()) + " qubits, state has " +
                                std::to_string(state.size()));
  RunResult out;
  if (record_entropy) {
    out.entropy.markers = c.markers();
    out.entropy.rows.reserve(c.size() + 1);
    out.entropy.rows.push_back({0, entropy_profile(state)});
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c.gates()[i];
    if (g.is_local()) {
      state = apply_single_qubit_gate(std::move(state), g.unitary(), g.target);
    } else {
      auto res = apply_mpo(std::move(state), gate_mpo(g, c.n_qubits()), policy);
      state = std::move(res.state);
      out.discarded_weight += res.discarded_weight;
    }
    if (record_entropy) out.entropy.rows.push_back({i + 1, entropy_profile(state)});
  }
  out.state = std::move(state);
  return out;
}

double grover_fidelity(const GroverProblem& p, std::size_t r,
                       const TruncationPolicy& policy) {
  const std::vector<int> zeros(p.n_qubits, 0);
  auto res = run_circuit(product_state(std::span<const int>(zeros)),
                         build_grover_circuit(p, r), policy);
  double f = 0.0;
  for (auto w : p.marked) f += std::norm(amplitude(res.state, w));
  return f;
}

}  // namespace mpsim

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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mpsim/common.hpp"
#include "mpsim/mpo.hpp"
#include "mpsim/mps.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/truncation.hpp"

namespace mpsim {

enum class GateKind { H, X, Z, Rk, RkDagger, Unitary, Swap };

/// One circuit element. Gates with an empty control list act on `target`
/// alone (or on `target` and `target2` for Swap); all other gates apply their
/// 2x2 matrix to `target` when every control qubit is |1>.
struct Gate {
  GateKind kind = GateKind::H;
  std::size_t target = 0;
  std::size_t target2 = 0;
  std::vector<std::size_t> controls;
  int k = 0;
  Matrix2 matrix = Matrix2::Identity();

  /// 2x2 matrix acting on the target (undefined for Swap).
  Matrix2 unitary() const;
  Gate adjoint() const;
  bool is_local() const { return controls.empty() && kind != GateKind::Swap; }

  friend bool operator==(const Gate& a, const Gate& b);
};

Gate h_gate(std::size_t q);
Gate x_gate(std::size_t q);
Gate z_gate(std::size_t q);
Gate rk_gate(int k, std::size_t q);
Gate unitary_gate(const Matrix2& u, std::size_t q);
Gate swap_gate(std::size_t a, std::size_t b);
Gate controlled(Gate g, std::vector<std::size_t> controls);

/// diag(1, exp(2 pi i / 2^k)).
Matrix2 rk_matrix(int k);

struct PhaseMarker {
  std::size_t layer = 0;  ///< index of the first gate of the phase
  std::string name;

  friend bool operator==(const PhaseMarker&, const PhaseMarker&) = default;
};

class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits = 1);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return gates_.size(); }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const std::vector<PhaseMarker>& markers() const noexcept { return markers_; }

  /// Validates qubit indices against the register.
  Circuit& add(Gate g);
  /// Starts a named phase at the next gate.
  Circuit& mark(std::string name);
  /// Appends `other` with every qubit index shifted by `offset`.
  Circuit& append(const Circuit& other, std::size_t offset = 0);

 private:
  std::size_t n_qubits_;
  std::vector<Gate> gates_;
  std::vector<PhaseMarker> markers_;
};

/// Reversed gate order with each gate conjugate-transposed. Markers are not
/// carried over.
Circuit invert(const Circuit& c);

/// Dense unitary of a circuit, for registers within `limit` qubits.
MatrixX circuit_to_dense(const Circuit& c, std::size_t limit = 10);

// ---------------------------------------------------------------------------
// Builders

struct QftOptions {
  int cutoff = 0;  ///< drop CR_k with k > cutoff; 0 keeps every rotation
  bool final_swaps = true;
};

Circuit build_qft(std::size_t n_qubits, QftOptions options = {});
/// QFT without rotations beyond R_l. Requires 2 <= l.
Circuit build_aqft(std::size_t n_qubits, int l, bool final_swaps = true);

/// Haar-random single-qubit unitary.
Matrix2 haar_unitary(Rng& rng);

/// `depth` alternating layers, starting with Haar single-qubit gates on every
/// qubit; the entangling layers are CNOT brickworks alternating between
/// pairs (0,1),(2,3),... and (1,2),(3,4),...
Circuit build_random_state_circuit(std::size_t n_qubits, std::size_t depth,
                                   std::uint64_t seed);

struct GroverProblem {
  std::size_t n_qubits = 0;
  std::vector<std::uint64_t> marked;

  GroverProblem() = default;
  GroverProblem(std::size_t n, std::vector<std::uint64_t> items);

  double n_items() const { return std::ldexp(1.0, static_cast<int>(n_qubits)); }
  std::size_t m() const { return marked.size(); }
  /// sin(alpha) = sqrt(m / n).
  double alpha() const;

  /// Distinct items drawn uniformly without replacement.
  static GroverProblem random(std::size_t n_qubits, std::size_t m, Rng& rng);
};

Circuit build_grover_oracle(const GroverProblem& p);
/// H X MCZ X H, equal to 1 - 2|s><s|.
Circuit build_grover_diffuser(std::size_t n_qubits);
/// Oracle, diffuser and a global sign, so that the iteration is
/// (2|s><s| - 1) U_f with eigenvalues exp(+-2i alpha) on the marked plane.
Circuit build_grover_iteration(const GroverProblem& p);
/// H layer followed by r iterations.
Circuit build_grover_circuit(const GroverProblem& p, std::size_t r);

std::size_t optimal_iterations(double n, double m);

struct CountingOptions {
  int aqft_cutoff = 0;  ///< 0 selects the full inverse QFT
};

/// Phase estimation of the Grover iteration. Qubits [0, n_top) form the
/// readout register; top qubit j controls 2^(n_top - 1 - j) iterations so
/// that the readout y after the inverse QFT is big-endian.
Circuit build_counting_circuit(std::size_t n_top, const GroverProblem& p,
                               CountingOptions options = {});
/// Prep and controlled iterations only (no inverse QFT).
Circuit build_counting_prefix(std::size_t n_top, const GroverProblem& p);
/// Iteration controlled on `control`, bottom register starting at `offset`.
Circuit build_controlled_grover(std::size_t total_qubits, std::size_t control,
                                std::size_t offset, const GroverProblem& p);

// ---------------------------------------------------------------------------
// Execution

struct EntropySnapshot {
  std::size_t layer = 0;
  std::vector<double> entropies;
};

struct EntropyMap {
  std::vector<EntropySnapshot> rows;
  std::vector<PhaseMarker> markers;
};

struct RunResult {
  Mps state;
  EntropyMap entropy;
  double discarded_weight = 0.0;
};

/// MPO for a multi-qubit gate.
Mpo gate_mpo(const Gate& g, std::size_t n_qubits);

/// Applies the gates in order. With `record_entropy`, row 0 holds the input
/// profile and row i the profile after gate i - 1.
RunResult run_circuit(Mps state, const Circuit& c, const TruncationPolicy& policy,
                      bool record_entropy = false);

/// Probability of the marked subspace after r iterations, sum_i |<w_i|psi_r>|^2.
double grover_fidelity(const GroverProblem& p, std::size_t r,
                       const TruncationPolicy& policy);

// ---------------------------------------------------------------------------
// Text format

/// One gate per line with 1-based qubit indices, e.g.
///   QUBITS 5
///   #phase QFT
///   H 1
///   RK 2 CONTROL 2 TARGET 1
///   MCZ CONTROLS 1,2 TARGET 3
///   SWAP 1 5
void write_circuit(std::ostream& out, const Circuit& c);
Circuit read_circuit(std::istream& in);
std::string to_text(const Circuit& c);
Circuit from_text(const std::string& text);

}  // namespace mpsim

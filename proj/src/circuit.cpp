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

#include "mpsim/circuit.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace mpsim {

Matrix2 rk_matrix(int k) {
  Matrix2 m = Matrix2::Identity();
  m(1, 1) = std::polar(1.0, 2.0 * std::numbers::pi / std::ldexp(1.0, k));
  return m;
}

Matrix2 Gate::unitary() const {
  Matrix2 m;
  switch (kind) {
    case GateKind::H:
      m << 1, 1, 1, -1;
      return m / std::numbers::sqrt2;
    case GateKind::X:
      m << 0, 1, 1, 0;
      return m;
    case GateKind::Z:
      m << 1, 0, 0, -1;
      return m;
    case GateKind::Rk:
      return rk_matrix(k);
    case GateKind::RkDagger:
      return rk_matrix(k).adjoint();
    case GateKind::Unitary:
      return matrix;
    case GateKind::Swap:
      break;
  }
  throw std::logic_error("Gate::unitary: SWAP has no 2x2 matrix");
}

Gate Gate::adjoint() const {
  Gate g = *this;
  if (kind == GateKind::Rk) g.kind = GateKind::RkDagger;
  else if (kind == GateKind::RkDagger) g.kind = GateKind::Rk;
  else if (kind == GateKind::Unitary) g.matrix = matrix.adjoint();
  return g;
}

bool operator==(const Gate& a, const Gate& b) {
  if (a.kind != b.kind || a.target != b.target || a.controls != b.controls)
    return false;
  switch (a.kind) {
    case GateKind::Swap:
      return a.target2 == b.target2;
    case GateKind::Rk:
    case GateKind::RkDagger:
      return a.k == b.k;
    case GateKind::Unitary:
      return a.matrix == b.matrix;
    default:
      return true;
  }
}

namespace {

Gate make_gate(GateKind kind, std::size_t q) {
  Gate g;
  g.kind = kind;
  g.target = q;
  return g;
}

}  // namespace

Gate h_gate(std::size_t q) { return make_gate(GateKind::H, q); }
Gate x_gate(std::size_t q) { return make_gate(GateKind::X, q); }
Gate z_gate(std::size_t q) { return make_gate(GateKind::Z, q); }

Gate rk_gate(int k, std::size_t q) {
  if (k < 1) throw std::invalid_argument("R_k needs k >= 1");
  Gate g = make_gate(GateKind::Rk, q);
  g.k = k;
  return g;
}

Gate unitary_gate(const Matrix2& u, std::size_t q) {
  Gate g = make_gate(GateKind::Unitary, q);
  g.matrix = u;
  return g;
}

Gate swap_gate(std::size_t a, std::size_t b) {
  Gate g = make_gate(GateKind::Swap, a);
  g.target2 = b;
  return g;
}

Gate controlled(Gate g, std::vector<std::size_t> controls) {
  if (g.kind == GateKind::Swap)
    throw std::invalid_argument("controlled SWAP is not supported");
  g.controls = std::move(controls);
  return g;
}

Circuit::Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits == 0) throw std::invalid_argument("circuit needs >= 1 qubit");
}

Circuit& Circuit::add(Gate g) {
  auto check = [&](std::size_t q) {
    if (q >= n_qubits_)
      throw std::out_of_range("gate qubit " + std::to_string(q) +
                              " outside a " + std::to_string(n_qubits_) +
                              "-qubit register");
  };
  check(g.target);
  if (g.kind == GateKind::Swap) {
    check(g.target2);
    if (g.target2 == g.target) throw std::invalid_argument("SWAP on one qubit");
  }
  if ((g.kind == GateKind::Rk || g.kind == GateKind::RkDagger) && g.k < 1)
    throw std::invalid_argument("R_k needs k >= 1");
  for (std::size_t i = 0; i < g.controls.size(); ++i) {
    check(g.controls[i]);
    if (g.controls[i] == g.target)
      throw std::invalid_argument("control equals target");
    for (std::size_t j = 0; j < i; ++j)
      if (g.controls[j] == g.controls[i])
        throw std::invalid_argument("duplicate control qubit");
  }
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::mark(std::string name) {
  markers_.push_back({gates_.size(), std::move(name)});
  return *this;
}

Circuit& Circuit::append(const Circuit& other, std::size_t offset) {
  if (other.n_qubits() + offset > n_qubits_)
    throw std::invalid_argument("appended circuit does not fit the register");
  for (const auto& m : other.markers_)
    markers_.push_back({gates_.size() + m.layer, m.name});
  for (Gate g : other.gates_) {
    g.target += offset;
    g.target2 += offset;
    for (auto& c : g.controls) c += offset;
    add(std::move(g));
  }
  return *this;
}

Circuit invert(const Circuit& c) {
  Circuit out(c.n_qubits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it)
    out.add(it->adjoint());
  return out;
}

namespace {

std::uint64_t bit_mask(std::size_t q, std::size_t n) {
  return std::uint64_t{1} << (n - 1 - q);
}

void apply_dense(const Gate& g, VectorX& psi, std::size_t n) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  if (g.kind == GateKind::Swap) {
    const auto a = bit_mask(g.target, n), b = bit_mask(g.target2, n);
    for (std::uint64_t i = 0; i < dim; ++i)
      if ((i & a) && !(i & b)) std::swap(psi(i), psi((i & ~a) | b));
    return;
  }
  std::uint64_t cmask = 0;
  for (auto c : g.controls) cmask |= bit_mask(c, n);
  const auto t = bit_mask(g.target, n);
  const Matrix2 u = g.unitary();
  for (std::uint64_t i = 0; i < dim; ++i) {
    if ((i & t) || (i & cmask) != cmask) continue;
    const cplx a0 = psi(i), a1 = psi(i | t);
    psi(i) = u(0, 0) * a0 + u(0, 1) * a1;
    psi(i | t) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

}  // namespace

MatrixX circuit_to_dense(const Circuit& c, std::size_t limit) {
  const std::size_t n = c.n_qubits();
  if (n > limit)
    throw std::invalid_argument("circuit_to_dense: " + std::to_string(n) +
                                " qubits exceed the limit");
  const Eigen::Index dim = Eigen::Index{1} << n;
  MatrixX out(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    VectorX psi = VectorX::Zero(dim);
    psi(col) = 1.0;
    for (const auto& g : c.gates()) apply_dense(g, psi, n);
    out.col(col) = psi;
  }
  return out;
}

}  // namespace mpsim

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mpsim/mpo.hpp"
#include "support/dense.hpp"
#include "support/random_mps.hpp"

using namespace mpsim;
using namespace mpsim::testing;

namespace {

std::vector<std::size_t> internal_bonds(const Mpo& op, std::size_t lo,
                                        std::size_t hi) {
  std::vector<std::size_t> b;
  for (std::size_t i = lo; i < hi; ++i) b.push_back(op.bond_dimension(i));
  return b;
}

double unitarity_error(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm();
}

TruncationPolicy zip_up(std::size_t chi) {
  TruncationPolicy p = TruncationPolicy::with_chi(chi);
  p.method = ZipUp{};
  return p;
}

}  // namespace

TEST_CASE("identity MPO densifies to the identity") {
  auto d = mpo_to_dense(identity_mpo(4));
  CHECK((d - Mat::Identity(16, 16)).norm() == 0.0);
  CHECK_FALSE(identity_mpo(3).support().has_value());
}

TEST_CASE("five-qubit C_{1,4,5} X_3 matches the projector sum") {
  // Zero-based: controls {0, 3, 4}, target 2.
  auto op = controlled_mpo(5, {0, 3, 4}, 2, pauli_x());
  Mat expected = projector_sum(5, {0, 3, 4}, 2, pauli_x());
  Mat d = mpo_to_dense(op);
  CHECK((d - expected).norm() < 1e-12);
  CHECK(unitarity_error(d) < 1e-12);
  CHECK(op.bond_dimensions() == std::vector<std::size_t>{3, 3, 3, 3});

  // Spectator qubit 1 carries the identity in all three channels.
  const auto& spectator = op.site(1);
  CHECK((spectator[0] - Mat::Identity(3, 3)).norm() == 0.0);
  CHECK((spectator[3] - Mat::Identity(3, 3)).norm() == 0.0);
  CHECK(spectator[1].norm() == 0.0);
}

TEST_CASE("CNOT and controlled phase on basis states") {
  auto cnot = controlled_mpo(2, {0}, 1, pauli_x());
  Mat d = mpo_to_dense(cnot);
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = expected(2, 3) = expected(3, 2) = 1.0;
  CHECK((d - expected).norm() < 1e-15);

  auto out = apply_mpo(product_state({1, 0}), cnot, TruncationPolicy::with_chi(2));
  CHECK(std::abs(amplitude(out.state, {1, 1}) - cplx(1)) < 1e-12);

  auto cr2 = controlled_mpo(2, {0}, 1, phase_rk(2));
  auto ph = apply_mpo(product_state({1, 1}), cr2, TruncationPolicy::exact());
  CHECK(std::abs(amplitude(ph.state, {1, 1}) - cplx(0, 1)) < 1e-12);
}

TEST_CASE("controlled_mpo argument errors") {
  CHECK_THROWS_AS(controlled_mpo(3, {1}, 1, pauli_x()), std::invalid_argument);
  CHECK_THROWS_AS(controlled_mpo(3, {}, 1, pauli_x()), std::invalid_argument);
  CHECK_THROWS_AS(controlled_mpo(3, {0, 0}, 1, pauli_x()), std::invalid_argument);
  CHECK_THROWS_AS(controlled_mpo(3, {3}, 1, pauli_x()), std::invalid_argument);
  CHECK_THROWS_AS(controlled_mpo(3, {0}, 5, pauli_x()), std::invalid_argument);
}

TEST_CASE("property: random controlled gates at bond dimension 3") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<std::size_t> qubits(n);
    std::iota(qubits.begin(), qubits.end(), 0);
    std::shuffle(qubits.begin(), qubits.end(), rng);
    const std::size_t target = qubits[0];
    const std::size_t n_controls = 1 + rng() % (n - 1);
    std::vector<std::size_t> controls(qubits.begin() + 1, qubits.begin() + 1 + n_controls);
    auto u = random_unitary(rng);
    auto op = controlled_mpo(n, std::span<const std::size_t>(controls), target, u);
    Mat d = mpo_to_dense(op);
    CHECK((d - projector_sum(n, controls, target, u)).norm() < 1e-10);
    CHECK(unitarity_error(d) < 1e-10);
    const auto [lo, hi] = op.support().value();
    for (auto b : internal_bonds(op, lo, hi)) CHECK(b == 3);
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (i < lo || i >= hi) CHECK(op.bond_dimension(i) == 1);
  }
}

TEST_CASE("control/target separation does not matter") {
  for (std::size_t n = 2; n <= 8; ++n) {
    auto op = controlled_mpo(n, {0}, n - 1, pauli_x());
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); b += 1 + n) {
      std::vector<int> bits(n);
      for (std::size_t q = 0; q < n; ++q) bits[q] = bit_of(b, q, n);
      auto out = apply_mpo(product_state(std::span<const int>(bits)), op,
                           TruncationPolicy::with_chi(4));
      std::uint64_t expected = b;
      if (bits[0] == 1) expected ^= 1u;
      CHECK(std::abs(amplitude(out.state, expected) - cplx(1)) < 1e-12);
    }
  }
}

TEST_CASE("swap_mpo") {
  auto s12 = swap_mpo(2, 0, 1);
  auto out = apply_mpo(product_state({1, 0}), s12, TruncationPolicy::exact());
  CHECK(std::abs(amplitude(out.state, {0, 1}) - cplx(1)) < 1e-12);

  auto s13 = swap_mpo(3, 0, 2);
  auto out3 = apply_mpo(product_state({1, 0, 0}), s13, TruncationPolicy::exact());
  CHECK(std::abs(amplitude(out3.state, {0, 0, 1}) - cplx(1)) < 1e-12);
  CHECK(s13.bond_dimensions() == std::vector<std::size_t>{4, 4});

  std::mt19937_64 rng(3);
  auto psi = random_mps(6, 8, rng);
  auto op = swap_mpo(6, 1, 4);
  auto twice = apply_mpo(apply_mpo(psi, op, TruncationPolicy::exact()).state, op,
                         TruncationPolicy::exact());
  CHECK(std::abs(fidelity(twice.state, psi) - 1.0) < 1e-12);

  for (std::size_t n = 2; n <= 6; ++n)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        Mat d = mpo_to_dense(swap_mpo(n, i, j));
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
          Vec e = Vec::Zero(d.rows());
          e(c) = 1.0;
          CHECK((d.col(c) - apply_swap(e, n, i, j)).norm() < 1e-12);
        }
      }
  CHECK_THROWS_AS(swap_mpo(3, 1, 1), std::invalid_argument);
}

TEST_CASE("two_site_mpo respects qubit order") {
  std::mt19937_64 rng(8);
  Eigen::Matrix4cd g;
  for (int i = 0; i < 16; ++i) g(i / 4, i % 4) = cplx(double(rng() % 7), double(rng() % 5));
  // Dense reference: act on |q_i q_j> with q_i as the high bit.
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 2}, {2, 0}, {1, 3}}) {
    const std::size_t n = 4;
    Mat d = mpo_to_dense(two_site_mpo(n, i, j, g));
    Mat ref = Mat::Zero(16, 16);
    for (std::uint64_t c = 0; c < 16; ++c)
      for (std::uint64_t r = 0; r < 16; ++r) {
        bool same = true;
        for (std::size_t q = 0; q < n; ++q)
          if (q != i && q != j && bit_of(r, q, n) != bit_of(c, q, n)) same = false;
        if (!same) continue;
        const int ro = 2 * bit_of(r, i, n) + bit_of(r, j, n);
        const int co = 2 * bit_of(c, i, n) + bit_of(c, j, n);
        ref(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = g(ro, co);
      }
    CHECK((d - ref).norm() < 1e-10);
  }
}

TEST_CASE("apply_mpo on a Bell preparation") {
  auto plus0 = apply_single_qubit_gate(product_state({0, 0}), hadamard(), 0);
  auto cnot = controlled_mpo(2, {0}, 1, pauli_x());
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);

  auto full = apply_mpo(plus0, cnot, TruncationPolicy::with_chi(2));
  CHECK((to_statevector(full.state) - bell).norm() < 1e-12);
  CHECK(entropy_profile(full.state)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  for (auto policy : {TruncationPolicy::with_chi(1), zip_up(1)}) {
    auto cut = apply_mpo(plus0, cnot, policy);
    CHECK(std::abs(std::norm(to_statevector(cut.state).dot(bell)) - 0.5) < 1e-12);
    CHECK(cut.discarded_weight == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("apply_mpo matches dense products") {
  std::mt19937_64 rng(12);
  Vec psi = random_state(3, rng);
  auto ccz = controlled_mpo(3, {0, 2}, 1, pauli_z());
  auto out = apply_mpo(from_statevector(psi), ccz, TruncationPolicy::with_chi(8));
  CHECK((to_statevector(out.state) - apply_controlled(psi, 3, {0, 2}, 1, pauli_z())).norm() < 1e-10);

  // Norm preservation when chi_max >= chi_in * chi_op.
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 4 + rng() % 5;
    auto state = random_mps(n, 4, rng);
    std::size_t c = rng() % n, tq = rng() % n;
    if (c == tq) tq = (tq + 1) % n;
    auto u = random_unitary(rng);
    auto res = apply_mpo(state, controlled_mpo(n, {c}, tq, u),
                         TruncationPolicy::with_chi(12));
    Vec dense = apply_controlled(to_statevector(state), n, {c}, tq, u);
    CHECK(std::abs(norm(res.state) - 1.0) < 1e-10);
    CHECK(std::abs(std::norm(to_statevector(res.state).dot(dense)) - 1.0) < 1e-10);
    CHECK(res.discarded_weight < 1e-10);
  }
}

TEST_CASE("property: variational never loses to ZipUp") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 5 + rng() % 6;
    auto state = random_mps(n, 6, rng);
    std::size_t c = rng() % n, tq = rng() % n;
    if (c == tq) tq = (tq + 1) % n;
    auto op = controlled_mpo(n, {c}, tq, random_unitary(rng));
    Vec target = mpo_to_dense(op) * to_statevector(state);
    target /= target.norm();
    const std::size_t chi = 2 + rng() % 3;
    auto zu = apply_mpo(state, op, zip_up(chi));
    TruncationPolicy var = TruncationPolicy::with_chi(chi);
    var.method = Variational{6, 1e-14};
    auto vr = apply_mpo(state, op, var);
    const double f_zu = std::norm(to_statevector(zu.state).dot(target));
    const double f_vr = std::norm(to_statevector(vr.state).dot(target));
    CHECK(f_vr >= f_zu - 1e-12);
    const auto [lo, hi] = op.support().value();
    for (std::size_t b = lo; b < hi; ++b) CHECK(vr.state.bond_dimension(b) <= chi);
    CHECK(std::abs(f_vr - (1.0 - vr.discarded_weight)) < 1e-10);
  }
}

TEST_CASE("apply_mpo argument errors") {
  auto op = controlled_mpo(3, {0}, 1, pauli_x());
  CHECK_THROWS_AS(apply_mpo(product_state({0, 0}), op, TruncationPolicy::exact()),
                  std::invalid_argument);
  TruncationPolicy bad;
  bad.chi_max = 0;
  CHECK_THROWS_AS(apply_mpo(product_state({0, 0, 0}), op, bad), std::invalid_argument);
  CHECK_THROWS_AS(mpo_to_dense(identity_mpo(13)), std::invalid_argument);
}

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

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpsim/common.hpp"
#include "mpsim/truncation.hpp"

namespace mpsim {

namespace detail {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealVec =
    Eigen::Matrix<typename Eigen::NumTraits<Scalar>::Real, Eigen::Dynamic, 1>;

template <typename Scalar>
struct ThinSvd {
  Mat<Scalar> u;
  RealVec<Scalar> s;
  Mat<Scalar> v;
};

// Divide-and-conquer pays off only beyond small blocks. BDCSVD occasionally
// returns non-finite singular vectors on strongly deflated inputs; Jacobi
// then serves as the fallback.
template <typename Scalar>
ThinSvd<Scalar> thin_svd(const Mat<Scalar>& m) {
  constexpr unsigned opts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  if (std::min(m.rows(), m.cols()) > 16) {
    Eigen::BDCSVD<Mat<Scalar>> svd(m, opts);
    if (svd.info() == Eigen::Success && svd.matrixU().allFinite() &&
        svd.matrixV().allFinite() && svd.singularValues().allFinite())
      return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  Eigen::JacobiSVD<Mat<Scalar>> svd(m, opts);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Rank-3 site tensor (left, phys, right) reshaped with (phys, left) on rows.
template <typename Scalar>
Mat<Scalar> stack_rows(const std::array<Mat<Scalar>, 2>& a) {
  Mat<Scalar> m(2 * a[0].rows(), a[0].cols());
  m << a[0], a[1];
  return m;
}

// Same tensor reshaped with (phys, right) on columns.
template <typename Scalar>
Mat<Scalar> stack_cols(const std::array<Mat<Scalar>, 2>& a) {
  Mat<Scalar> m(a[0].rows(), 2 * a[0].cols());
  m << a[0], a[1];
  return m;
}

template <typename Scalar>
void split_rows(const Mat<Scalar>& m, Eigen::Index left,
                std::array<Mat<Scalar>, 2>& out) {
  out[0] = m.topRows(left);
  out[1] = m.middleRows(left, left);
}

template <typename Scalar>
void split_cols(const Mat<Scalar>& m, Eigen::Index right,
                std::array<Mat<Scalar>, 2>& out) {
  out[0] = m.leftCols(right);
  out[1] = m.middleCols(right, right);
}

}  // namespace detail

/// Open-boundary matrix product state of a qubit register.
///
/// Site `i` stores two matrices A_i^0, A_i^1 of shape chi_{i-1} x chi_i with
/// chi_{-1} = chi_{N-1} = 1. Qubit 0 is the most significant bit of the basis
/// index. When `center()` is set, sites left of it are left-canonical and
/// sites right of it are right-canonical.
template <typename Scalar>
class BasicMps {
 public:
  using scalar_type = Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = detail::Mat<Scalar>;
  using SiteTensor = std::array<Matrix, 2>;

  BasicMps() = default;

  explicit BasicMps(std::vector<SiteTensor> sites,
                    std::optional<std::size_t> center = std::nullopt)
      : sites_(std::move(sites)), center_(center) {
    check_shapes();
  }

  std::size_t size() const noexcept { return sites_.size(); }

  const SiteTensor& site(std::size_t i) const { return sites_.at(i); }

  /// Mutable access drops the canonical-center bookkeeping; callers that
  /// preserve it restore it with set_center().
  SiteTensor& site(std::size_t i) {
    center_.reset();
    return sites_.at(i);
  }

  std::optional<std::size_t> center() const noexcept { return center_; }
  void set_center(std::optional<std::size_t> c) noexcept { center_ = c; }

  /// Sum of the weights discarded by every truncation this state went
  /// through, each measured before renormalization.
  double discarded_weight() const noexcept { return discarded_weight_; }
  void add_discarded_weight(double w) noexcept { discarded_weight_ += w; }

  /// Dimension of the bond between sites `bond` and `bond + 1`.
  std::size_t bond_dimension(std::size_t bond) const {
    if (bond + 1 >= sites_.size()) throw std::out_of_range("bond index");
    return static_cast<std::size_t>(sites_[bond][0].cols());
  }

  std::vector<std::size_t> bond_dimensions() const {
    std::vector<std::size_t> dims;
    for (std::size_t b = 0; b + 1 < sites_.size(); ++b)
      dims.push_back(bond_dimension(b));
    return dims;
  }

  std::size_t max_bond_dimension() const {
    std::size_t m = 1;
    for (std::size_t b = 0; b + 1 < sites_.size(); ++b)
      m = std::max(m, bond_dimension(b));
    return m;
  }

 private:
  void check_shapes() const {
    if (sites_.empty()) throw std::invalid_argument("MPS needs >= 1 site");
    if (sites_.front()[0].rows() != 1 || sites_.back()[0].cols() != 1)
      throw std::invalid_argument("MPS boundary bonds must have dimension 1");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      const auto& s = sites_[i];
      if (s[0].rows() != s[1].rows() || s[0].cols() != s[1].cols())
        throw std::invalid_argument("site " + std::to_string(i) +
                                    ": physical slices differ in shape");
      if (i + 1 < sites_.size() && s[0].cols() != sites_[i + 1][0].rows())
        throw std::invalid_argument("bond " + std::to_string(i) +
                                    ": dimension mismatch");
    }
    if (center_ && *center_ >= sites_.size())
      throw std::invalid_argument("center out of range");
  }

  std::vector<SiteTensor> sites_;
  std::optional<std::size_t> center_;
  double discarded_weight_ = 0.0;
};

using Mps = BasicMps<cplx>;

template <typename Scalar>
struct CompressResult {
  BasicMps<Scalar> state;
  double discarded_weight = 0.0;
};

// ---------------------------------------------------------------------------
// Construction

template <typename Scalar = cplx>
BasicMps<Scalar> product_state(std::span<const int> bits) {
  if (bits.empty()) throw std::invalid_argument("product_state: no qubits");
  using M = detail::Mat<Scalar>;
  std::vector<typename BasicMps<Scalar>::SiteTensor> sites;
  sites.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1)
      throw std::invalid_argument("product_state: bits must be 0 or 1");
    typename BasicMps<Scalar>::SiteTensor t{M::Zero(1, 1), M::Zero(1, 1)};
    t[static_cast<std::size_t>(b)](0, 0) = Scalar(1);
    sites.push_back(std::move(t));
  }
  return BasicMps<Scalar>(std::move(sites), std::size_t{0});
}

template <typename Scalar = cplx>
BasicMps<Scalar> product_state(std::initializer_list<int> bits) {
  return product_state<Scalar>(std::span<const int>(bits.begin(), bits.size()));
}

/// Exact MPS of a dense state vector of length 2^N (successive SVDs).
template <typename Scalar>
BasicMps<Scalar> from_statevector(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& psi) {
  using M = detail::Mat<Scalar>;
  const Eigen::Index len = psi.size();
  if (len < 2 || (len & (len - 1)) != 0)
    throw std::invalid_argument("from_statevector: length must be 2^N, N >= 1");
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < len) ++n;

  std::vector<typename BasicMps<Scalar>::SiteTensor> sites(n);
  M rest = psi.transpose();
  Eigen::Index left = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Eigen::Index cols = rest.cols() / 2;
    M m(2 * left, cols);
    m << rest.leftCols(cols), rest.rightCols(cols);
    auto svd = detail::thin_svd<Scalar>(m);
    TruncationPolicy exact;
    const auto keep = static_cast<Eigen::Index>(kept_count(svd.s, exact));
    M u = svd.u.leftCols(keep);
    detail::split_rows<Scalar>(u, left, sites[i]);
    rest = svd.s.head(keep).template cast<Scalar>().asDiagonal() *
           svd.v.leftCols(keep).adjoint();
    left = keep;
  }
  sites[n - 1] = {rest.col(0), rest.col(1)};
  return BasicMps<Scalar>(std::move(sites), n - 1);
}

// ---------------------------------------------------------------------------
// Canonical forms

namespace detail {

template <typename Scalar>
void left_orthonormalize(BasicMps<Scalar>& state, std::size_t i) {
  using M = Mat<Scalar>;
  auto& a = state.site(i);
  const Eigen::Index left = a[0].rows();
  M m = stack_rows<Scalar>(a);
  Eigen::HouseholderQR<M> qr(m);
  const Eigen::Index k = std::min(m.rows(), m.cols());
  M q = qr.householderQ() * M::Identity(m.rows(), k);
  M r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  split_rows<Scalar>(q, left, a);
  auto& b = state.site(i + 1);
  b[0] = r * b[0];
  b[1] = r * b[1];
}

template <typename Scalar>
void right_orthonormalize(BasicMps<Scalar>& state, std::size_t i) {
  using M = Mat<Scalar>;
  auto& a = state.site(i);
  const Eigen::Index right = a[0].cols();
  M mt = stack_cols<Scalar>(a).adjoint();
  Eigen::HouseholderQR<M> qr(mt);
  const Eigen::Index k = std::min(mt.rows(), mt.cols());
  M q = qr.householderQ() * M::Identity(mt.rows(), k);
  M r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  M qa = q.adjoint();
  split_cols<Scalar>(qa, right, a);
  auto& b = state.site(i - 1);
  M ra = r.adjoint();
  b[0] = b[0] * ra;
  b[1] = b[1] * ra;
}

}  // namespace detail

/// Moves the orthogonality center to `center`, reusing an existing center
/// when the state carries one. The represented state is unchanged.
template <typename Scalar>
BasicMps<Scalar> canonicalize(BasicMps<Scalar> state, std::size_t center) {
  const std::size_t n = state.size();
  if (center >= n) throw std::out_of_range("canonicalize: center out of range");
  if (auto c = state.center()) {
    for (std::size_t i = *c; i < center; ++i)
      detail::left_orthonormalize(state, i);
    for (std::size_t i = *c; i > center; --i)
      detail::right_orthonormalize(state, i);
  } else {
    for (std::size_t i = 0; i < center; ++i) detail::left_orthonormalize(state, i);
    for (std::size_t i = n - 1; i > center; --i)
      detail::right_orthonormalize(state, i);
  }
  state.set_center(center);
  return state;
}

/// ||sum_s A^s† A^s - I|| for site i; zero when the site is left-canonical.
template <typename Scalar>
double left_canonical_error(const BasicMps<Scalar>& state, std::size_t i) {
  const auto& a = state.site(i);
  detail::Mat<Scalar> g =
      a[0].adjoint() * a[0] + a[1].adjoint() * a[1];
  g -= detail::Mat<Scalar>::Identity(g.rows(), g.cols());
  return static_cast<double>(g.norm());
}

/// ||sum_s A^s A^s† - I|| for site i; zero when the site is right-canonical.
template <typename Scalar>
double right_canonical_error(const BasicMps<Scalar>& state, std::size_t i) {
  const auto& a = state.site(i);
  detail::Mat<Scalar> g =
      a[0] * a[0].adjoint() + a[1] * a[1].adjoint();
  g -= detail::Mat<Scalar>::Identity(g.rows(), g.cols());
  return static_cast<double>(g.norm());
}

// ---------------------------------------------------------------------------
// Contractions

template <typename Scalar>
Scalar inner(const BasicMps<Scalar>& a, const BasicMps<Scalar>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner: states have different qubit counts");
  detail::Mat<Scalar> env = detail::Mat<Scalar>::Ones(1, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.site(i);
    const auto& y = b.site(i);
    env = x[0].adjoint() * env * y[0] + x[1].adjoint() * env * y[1];
  }
  return env(0, 0);
}

template <typename Scalar>
double fidelity(const BasicMps<Scalar>& a, const BasicMps<Scalar>& b) {
  return static_cast<double>(std::norm(inner(a, b)));
}

template <typename Scalar>
double norm(const BasicMps<Scalar>& state) {
  if (auto c = state.center()) {
    const auto& a = state.site(*c);
    return std::sqrt(static_cast<double>(a[0].squaredNorm() + a[1].squaredNorm()));
  }
  return std::sqrt(static_cast<double>(std::real(inner(state, state))));
}

template <typename Scalar>
BasicMps<Scalar> normalize(BasicMps<Scalar> state) {
  const double n = norm(state);
  if (!(n > 0.0)) throw InvalidState("normalize: zero-norm state");
  const auto c = state.center();
  auto& a = state.site(c.value_or(0));
  const Scalar f(static_cast<typename BasicMps<Scalar>::Real>(1.0 / n));
  a[0] *= f;
  a[1] *= f;
  state.set_center(c);
  return state;
}

template <typename Scalar>
Scalar amplitude(const BasicMps<Scalar>& state, std::span<const int> bits) {
  if (bits.size() != state.size())
    throw std::invalid_argument("amplitude: bitstring length mismatch");
  detail::Mat<Scalar> v = detail::Mat<Scalar>::Ones(1, 1);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1)
      throw std::invalid_argument("amplitude: bits must be 0 or 1");
    v = v * state.site(i)[static_cast<std::size_t>(bits[i])];
  }
  return v(0, 0);
}

template <typename Scalar>
Scalar amplitude(const BasicMps<Scalar>& state, std::initializer_list<int> bits) {
  return amplitude(state, std::span<const int>(bits.begin(), bits.size()));
}

/// Amplitude of basis index `index` (qubit 0 is the most significant bit).
template <typename Scalar>
Scalar amplitude(const BasicMps<Scalar>& state, std::uint64_t index) {
  const std::size_t n = state.size();
  detail::Mat<Scalar> v = detail::Mat<Scalar>::Ones(1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto bit = static_cast<std::size_t>((index >> (n - 1 - i)) & 1u);
    v = v * state.site(i)[bit];
  }
  return v(0, 0);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> to_statevector(
    const BasicMps<Scalar>& state, std::size_t limit = kDefaultDenseLimit) {
  using M = detail::Mat<Scalar>;
  if (state.size() > limit)
    throw std::invalid_argument("to_statevector: " +
                                std::to_string(state.size()) +
                                " qubits exceeds the dense limit of " +
                                std::to_string(limit));
  M psi = M::Ones(1, 1);
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& a = state.site(i);
    M p0 = psi * a[0];
    M p1 = psi * a[1];
    M next(2 * psi.rows(), a[0].cols());
    for (Eigen::Index r = 0; r < psi.rows(); ++r) {
      next.row(2 * r) = p0.row(r);
      next.row(2 * r + 1) = p1.row(r);
    }
    psi = std::move(next);
  }
  return psi.col(0);
}

// ---------------------------------------------------------------------------
// Single-qubit gates

template <typename Scalar>
BasicMps<Scalar> apply_single_qubit_gate(BasicMps<Scalar> state,
                                         const Eigen::Matrix<Scalar, 2, 2>& gate,
                                         std::size_t site) {
  if (site >= state.size())
    throw std::out_of_range("apply_single_qubit_gate: site out of range");
  const auto center = state.center();
  const bool unitary =
      ((gate.adjoint() * gate - Eigen::Matrix<Scalar, 2, 2>::Identity()).norm() <
       1e-12);
  auto& a = state.site(site);
  detail::Mat<Scalar> b0 = gate(0, 0) * a[0] + gate(0, 1) * a[1];
  detail::Mat<Scalar> b1 = gate(1, 0) * a[0] + gate(1, 1) * a[1];
  a[0] = std::move(b0);
  a[1] = std::move(b1);
  if (center && (unitary || *center == site)) state.set_center(center);
  return state;
}

// ---------------------------------------------------------------------------
// Truncation

/// Cuts every bond to the policy's limits with a left-to-right SVD sweep on
/// the right-canonical form. The result is normalized with its center on the
/// last site; the discarded weight is relative to the input norm.
template <typename Scalar>
CompressResult<Scalar> compress(BasicMps<Scalar> state,
                                const TruncationPolicy& policy) {
  policy.validate();
  using M = detail::Mat<Scalar>;
  const std::size_t n = state.size();
  state = canonicalize(std::move(state), 0);
  const double before = std::pow(norm(state), 2);
  if (!(before > 0.0)) throw InvalidState("compress: zero-norm state");

  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto& a = state.site(i);
    const Eigen::Index left = a[0].rows();
    auto svd = detail::thin_svd<Scalar>(detail::stack_rows<Scalar>(a));
    const auto keep = static_cast<Eigen::Index>(kept_count(svd.s, policy));
    M u = svd.u.leftCols(keep);
    detail::split_rows<Scalar>(u, left, a);
    M sv = svd.s.head(keep).template cast<Scalar>().asDiagonal() *
           svd.v.leftCols(keep).adjoint();
    auto& b = state.site(i + 1);
    b[0] = sv * b[0];
    b[1] = sv * b[1];
  }
  state.set_center(n - 1);
  const double after = std::pow(norm(state), 2);
  const double discarded = std::max(0.0, 1.0 - after / before);
  state = normalize(std::move(state));
  state.add_discarded_weight(discarded);
  return {std::move(state), discarded};
}

/// Truncates only the bond between `bond` and `bond + 1` to `chi_max`
/// Schmidt values and renormalizes.
template <typename Scalar>
CompressResult<Scalar> truncate_bond(BasicMps<Scalar> state, std::size_t bond,
                                     std::size_t chi_max) {
  if (bond + 1 >= state.size()) throw std::out_of_range("truncate_bond: bond");
  using M = detail::Mat<Scalar>;
  const auto policy = TruncationPolicy::with_chi(chi_max);
  policy.validate();
  state = canonicalize(std::move(state), bond);
  auto& a = state.site(bond);
  const Eigen::Index left = a[0].rows();
  auto svd = detail::thin_svd<Scalar>(detail::stack_rows<Scalar>(a));
  const auto keep = static_cast<Eigen::Index>(kept_count(svd.s, policy));
  const double total = static_cast<double>(svd.s.squaredNorm());
  const double kept = static_cast<double>(svd.s.head(keep).squaredNorm());
  M u = svd.u.leftCols(keep);
  detail::split_rows<Scalar>(u, left, a);
  M sv = svd.s.head(keep).template cast<Scalar>().asDiagonal() *
         svd.v.leftCols(keep).adjoint();
  auto& b = state.site(bond + 1);
  b[0] = sv * b[0];
  b[1] = sv * b[1];
  state.set_center(bond + 1);
  state = normalize(std::move(state));
  const double discarded = std::max(0.0, 1.0 - kept / total);
  state.add_discarded_weight(discarded);
  return {std::move(state), discarded};
}

// ---------------------------------------------------------------------------
// Entanglement

/// Schmidt coefficients at every bond, normalized so their squares sum to 1.
template <typename Scalar>
std::vector<detail::RealVec<Scalar>> schmidt_values(BasicMps<Scalar> state) {
  using M = detail::Mat<Scalar>;
  const std::size_t n = state.size();
  state = canonicalize(std::move(state), 0);
  std::vector<detail::RealVec<Scalar>> out;
  out.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto& a = state.site(i);
    const Eigen::Index left = a[0].rows();
    auto svd = detail::thin_svd<Scalar>(detail::stack_rows<Scalar>(a));
    M u = svd.u;
    detail::split_rows<Scalar>(u, left, a);
    M sv = svd.s.template cast<Scalar>().asDiagonal() * svd.v.adjoint();
    auto& b = state.site(i + 1);
    b[0] = sv * b[0];
    b[1] = sv * b[1];
    const auto total = svd.s.norm();
    out.push_back(total > 0 ? detail::RealVec<Scalar>(svd.s / total) : svd.s);
  }
  return out;
}

/// Schmidt values below this are treated as exact zeros.
inline constexpr double kEntropyZero = 1e-14;

/// Von Neumann entropy (nats) of the first L qubits for L = 1..N-1.
template <typename Scalar>
std::vector<double> entropy_profile(const BasicMps<Scalar>& state) {
  const double nrm = norm(state);
  if (std::abs(nrm - 1.0) > 1e-6)
    throw InvalidState("entropy_profile: state norm is " + std::to_string(nrm));
  std::vector<double> s;
  for (const auto& sv : schmidt_values(state)) {
    double e = 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      const double x = static_cast<double>(sv(k));
      if (x < kEntropyZero) continue;
      e -= x * x * std::log(x * x);
    }
    s.push_back(std::max(0.0, e));
  }
  return s;
}

}  // namespace mpsim

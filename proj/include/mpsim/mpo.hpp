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
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mpsim/common.hpp"
#include "mpsim/mps.hpp"
#include "mpsim/truncation.hpp"

namespace mpsim {

/// Matrix product operator on a qubit register.
///
/// Site `i` stores four matrices W_i^{out,in} of shape w_{i-1} x w_i, indexed
/// as `2 * out + in`. Boundary bonds have dimension 1.
template <typename Scalar>
class BasicMpo {
 public:
  using Matrix = detail::Mat<Scalar>;
  using SiteTensor = std::array<Matrix, 4>;

  BasicMpo() = default;

  explicit BasicMpo(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) throw std::invalid_argument("MPO needs >= 1 site");
    if (sites_.front()[0].rows() != 1 || sites_.back()[0].cols() != 1)
      throw std::invalid_argument("MPO boundary bonds must have dimension 1");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      for (const auto& w : sites_[i])
        if (w.rows() != sites_[i][0].rows() || w.cols() != sites_[i][0].cols())
          throw std::invalid_argument("MPO site " + std::to_string(i) +
                                      ": inconsistent slice shapes");
      if (i + 1 < sites_.size() && sites_[i][0].cols() != sites_[i + 1][0].rows())
        throw std::invalid_argument("MPO bond " + std::to_string(i) +
                                    ": dimension mismatch");
    }
  }

  std::size_t size() const noexcept { return sites_.size(); }
  const SiteTensor& site(std::size_t i) const { return sites_.at(i); }

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

  /// First and last site on which the operator differs from the identity.
  /// Bonds outside this window have dimension 1.
  std::optional<std::pair<std::size_t, std::size_t>> support() const {
    std::optional<std::size_t> lo, hi;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      if (!is_identity_site(i)) {
        if (!lo) lo = i;
        hi = i;
      }
    }
    if (!lo) return std::nullopt;
    return std::make_pair(*lo, *hi);
  }

 private:
  bool is_identity_site(std::size_t i) const {
    const auto& w = sites_[i];
    if (w[0].rows() != 1 || w[0].cols() != 1) return false;
    return w[0](0, 0) == Scalar(1) && w[3](0, 0) == Scalar(1) &&
           w[1](0, 0) == Scalar(0) && w[2](0, 0) == Scalar(0);
  }

  std::vector<SiteTensor> sites_;
};

using Mpo = BasicMpo<cplx>;

namespace detail {

template <typename Scalar>
typename BasicMpo<Scalar>::SiteTensor diagonal_site(
    const std::vector<Eigen::Matrix<Scalar, 2, 2>>& channels) {
  const auto w = static_cast<Eigen::Index>(channels.size());
  typename BasicMpo<Scalar>::SiteTensor t;
  for (int k = 0; k < 4; ++k) {
    t[k] = Mat<Scalar>::Zero(w, w);
    for (Eigen::Index c = 0; c < w; ++c)
      t[k](c, c) = channels[static_cast<std::size_t>(c)](k / 2, k % 2);
  }
  return t;
}

template <typename Scalar>
typename BasicMpo<Scalar>::SiteTensor identity_site(Eigen::Index w) {
  typename BasicMpo<Scalar>::SiteTensor t;
  t[0] = Mat<Scalar>::Identity(w, w);
  t[1] = Mat<Scalar>::Zero(w, w);
  t[2] = Mat<Scalar>::Zero(w, w);
  t[3] = Mat<Scalar>::Identity(w, w);
  return t;
}

}  // namespace detail

template <typename Scalar = cplx>
BasicMpo<Scalar> identity_mpo(std::size_t n_qubits) {
  if (n_qubits == 0) throw std::invalid_argument("identity_mpo: no qubits");
  return BasicMpo<Scalar>(std::vector<typename BasicMpo<Scalar>::SiteTensor>(
      n_qubits, detail::identity_site<Scalar>(1)));
}

/// Single-qubit gate `u` on `target`, applied when every control qubit is
/// |1>. Built as the three-channel sum
///   I - P_c1 ... P_cL  +  P_c1 ... U_t ... P_cL
/// whose internal bonds have dimension exactly 3 between the outermost
/// involved qubits and 1 elsewhere.
template <typename Scalar = cplx>
BasicMpo<Scalar> controlled_mpo(std::size_t n_qubits,
                                std::span<const std::size_t> controls,
                                std::size_t target,
                                const Eigen::Matrix<Scalar, 2, 2>& u) {
  using M2 = Eigen::Matrix<Scalar, 2, 2>;
  if (controls.empty())
    throw std::invalid_argument(
        "controlled_mpo: no controls; apply the gate as a single-qubit gate");
  if (target >= n_qubits)
    throw std::invalid_argument("controlled_mpo: target out of range");
  std::set<std::size_t> cset;
  for (auto c : controls) {
    if (c >= n_qubits)
      throw std::invalid_argument("controlled_mpo: control out of range");
    if (c == target)
      throw std::invalid_argument("controlled_mpo: control equals target");
    if (!cset.insert(c).second)
      throw std::invalid_argument("controlled_mpo: duplicate control");
  }
  const std::size_t lo = std::min(*cset.begin(), target);
  const std::size_t hi = std::max(*cset.rbegin(), target);

  const M2 id = M2::Identity();
  M2 proj = M2::Zero();
  proj(1, 1) = Scalar(1);

  std::vector<typename BasicMpo<Scalar>::SiteTensor> sites;
  sites.reserve(n_qubits);
  for (std::size_t s = 0; s < n_qubits; ++s) {
    if (s < lo || s > hi) {
      sites.push_back(detail::identity_site<Scalar>(1));
      continue;
    }
    std::vector<M2> ch;
    if (s == target)
      ch = {id, id, u};
    else if (cset.count(s))
      ch = {id, proj, proj};
    else
      ch = {id, id, id};

    typename BasicMpo<Scalar>::SiteTensor t;
    if (s == lo) {
      ch[1] = -ch[1];
      for (int k = 0; k < 4; ++k) {
        t[k] = detail::Mat<Scalar>(1, 3);
        for (int c = 0; c < 3; ++c) t[k](0, c) = ch[c](k / 2, k % 2);
      }
    } else if (s == hi) {
      for (int k = 0; k < 4; ++k) {
        t[k] = detail::Mat<Scalar>(3, 1);
        for (int c = 0; c < 3; ++c) t[k](c, 0) = ch[c](k / 2, k % 2);
      }
    } else {
      t = detail::diagonal_site<Scalar>(ch);
    }
    sites.push_back(std::move(t));
  }
  return BasicMpo<Scalar>(std::move(sites));
}

template <typename Scalar = cplx>
BasicMpo<Scalar> controlled_mpo(std::size_t n_qubits,
                                std::initializer_list<std::size_t> controls,
                                std::size_t target,
                                const Eigen::Matrix<Scalar, 2, 2>& u) {
  return controlled_mpo<Scalar>(
      n_qubits, std::span<const std::size_t>(controls.begin(), controls.size()),
      target, u);
}

/// Two-qubit gate on (i, j) as an MPO. `g` acts on the basis |q_i q_j> with
/// q_i as the more significant bit. The operator-Schmidt decomposition splits
/// singular values as sqrt(s) onto each side; bonds between i and j carry the
/// Schmidt rank (at most 4).
template <typename Scalar = cplx>
BasicMpo<Scalar> two_site_mpo(std::size_t n_qubits, std::size_t i, std::size_t j,
                              const Eigen::Matrix<Scalar, 4, 4>& g) {
  using M = detail::Mat<Scalar>;
  if (i >= n_qubits || j >= n_qubits)
    throw std::invalid_argument("two_site_mpo: qubit out of range");
  if (i == j) throw std::invalid_argument("two_site_mpo: qubits must differ");

  Eigen::Matrix<Scalar, 4, 4> gate = g;
  if (i > j) {
    Eigen::Matrix<Scalar, 4, 4> swap = Eigen::Matrix<Scalar, 4, 4>::Zero();
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = Scalar(1);
    gate = swap * g * swap;
    std::swap(i, j);
  }

  // R((a_out, a_in), (b_out, b_in)) = G(2 a_out + b_out, 2 a_in + b_in)
  M r(4, 4);
  for (int ao = 0; ao < 2; ++ao)
    for (int ai = 0; ai < 2; ++ai)
      for (int bo = 0; bo < 2; ++bo)
        for (int bi = 0; bi < 2; ++bi)
          r(2 * ao + ai, 2 * bo + bi) = gate(2 * ao + bo, 2 * ai + bi);

  auto svd = detail::thin_svd<Scalar>(r);
  const auto rank =
      static_cast<Eigen::Index>(kept_count(svd.s, TruncationPolicy::exact()));
  M left = svd.u.leftCols(rank) *
           svd.s.head(rank).cwiseSqrt().template cast<Scalar>().asDiagonal();
  M right = svd.s.head(rank).cwiseSqrt().template cast<Scalar>().asDiagonal() *
            svd.v.leftCols(rank).adjoint();

  std::vector<typename BasicMpo<Scalar>::SiteTensor> sites;
  sites.reserve(n_qubits);
  for (std::size_t s = 0; s < n_qubits; ++s) {
    if (s < i || s > j) {
      sites.push_back(detail::identity_site<Scalar>(1));
    } else if (s == i) {
      typename BasicMpo<Scalar>::SiteTensor t;
      for (int k = 0; k < 4; ++k) t[k] = left.row(k);
      sites.push_back(std::move(t));
    } else if (s == j) {
      typename BasicMpo<Scalar>::SiteTensor t;
      for (int k = 0; k < 4; ++k) t[k] = right.col(k);
      sites.push_back(std::move(t));
    } else {
      sites.push_back(detail::identity_site<Scalar>(rank));
    }
  }
  return BasicMpo<Scalar>(std::move(sites));
}

template <typename Scalar = cplx>
BasicMpo<Scalar> swap_mpo(std::size_t n_qubits, std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("swap_mpo: qubits must differ");
  Eigen::Matrix<Scalar, 4, 4> swap = Eigen::Matrix<Scalar, 4, 4>::Zero();
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = Scalar(1);
  return two_site_mpo<Scalar>(n_qubits, i, j, swap);
}

/// Dense 2^N x 2^N matrix of the operator, qubit 0 most significant.
template <typename Scalar>
detail::Mat<Scalar> mpo_to_dense(const BasicMpo<Scalar>& op,
                                 std::size_t limit = 12) {
  using M = detail::Mat<Scalar>;
  const std::size_t n = op.size();
  if (n > limit)
    throw std::invalid_argument("mpo_to_dense: " + std::to_string(n) +
                                " qubits exceeds the dense limit of " +
                                std::to_string(limit));
  const Eigen::Index dim = Eigen::Index{1} << n;
  M dense(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    M acc = M::Ones(1, 1);  // rows: output prefix, cols: bond
    for (std::size_t s = 0; s < n; ++s) {
      const int in = static_cast<int>((col >> (n - 1 - s)) & 1);
      const auto& w = op.site(s);
      M p0 = acc * w[static_cast<std::size_t>(in)];
      M p1 = acc * w[static_cast<std::size_t>(2 + in)];
      M next(2 * acc.rows(), w[0].cols());
      for (Eigen::Index r = 0; r < acc.rows(); ++r) {
        next.row(2 * r) = p0.row(r);
        next.row(2 * r + 1) = p1.row(r);
      }
      acc = std::move(next);
    }
    dense.col(col) = acc.col(0);
  }
  return dense;
}

// ---------------------------------------------------------------------------
// Application

namespace detail {

// T^{out} = sum_in W^{out,in} (x) A^{in}, bond index (w, a) -> w * chi + a.
template <typename Scalar>
typename BasicMps<Scalar>::SiteTensor contract_site(
    const typename BasicMpo<Scalar>::SiteTensor& w,
    const typename BasicMps<Scalar>::SiteTensor& a) {
  const Eigen::Index wl = w[0].rows(), wr = w[0].cols();
  const Eigen::Index al = a[0].rows(), ar = a[0].cols();
  typename BasicMps<Scalar>::SiteTensor t;
  for (int out = 0; out < 2; ++out) {
    Mat<Scalar> m = Mat<Scalar>::Zero(wl * al, wr * ar);
    for (int in = 0; in < 2; ++in) {
      const auto& wk = w[static_cast<std::size_t>(2 * out + in)];
      for (Eigen::Index x = 0; x < wl; ++x)
        for (Eigen::Index y = 0; y < wr; ++y)
          if (wk(x, y) != Scalar(0))
            m.block(x * al, y * ar, al, ar) += wk(x, y) * a[static_cast<std::size_t>(in)];
    }
    t[static_cast<std::size_t>(out)] = std::move(m);
  }
  return t;
}

template <typename Scalar>
Mat<Scalar> two_site_block(const Mat<Scalar>& left_env,
                           const typename BasicMps<Scalar>::SiteTensor& a,
                           const typename BasicMps<Scalar>::SiteTensor& b,
                           const Mat<Scalar>& right_env) {
  std::array<Mat<Scalar>, 2> la{left_env * a[0], left_env * a[1]};
  std::array<Mat<Scalar>, 2> br{b[0] * right_env, b[1] * right_env};
  const Eigen::Index rows = la[0].rows(), cols = br[0].cols();
  Mat<Scalar> theta(2 * rows, 2 * cols);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta.block(s1 * rows, s2 * cols, rows, cols) = la[s1] * br[s2];
  return theta;
}

// Right-to-left two-site fitting pass of `phi` (center at hi) onto `target`.
// Returns the fidelity |<phi|target>|^2 / <target|target> after the pass.
template <typename Scalar>
double fit_right_to_left(BasicMps<Scalar>& phi, const BasicMps<Scalar>& target,
                         std::size_t lo, std::size_t hi,
                         const TruncationPolicy& policy, double target_norm2) {
  using M = Mat<Scalar>;
  std::vector<M> left(hi - lo + 1);
  left[0] = M::Identity(phi.site(lo)[0].rows(), target.site(lo)[0].rows());
  for (std::size_t s = lo; s + 1 < hi; ++s) {
    const auto& p = phi.site(s);
    const auto& t = target.site(s);
    left[s - lo + 1] = p[0].adjoint() * left[s - lo] * t[0] +
                       p[1].adjoint() * left[s - lo] * t[1];
  }
  M right = M::Identity(target.site(hi)[0].cols(), phi.site(hi)[0].cols());
  double f = 0.0;
  for (std::size_t s = hi; s-- > lo;) {
    M theta = two_site_block<Scalar>(left[s - lo], target.site(s),
                                     target.site(s + 1), right);
    const Eigen::Index rows = theta.rows() / 2, cols = theta.cols() / 2;
    auto svd = thin_svd<Scalar>(theta);
    const auto keep = static_cast<Eigen::Index>(kept_count(svd.s, policy));
    const double kept = static_cast<double>(svd.s.head(keep).squaredNorm());
    const auto scale = static_cast<typename BasicMps<Scalar>::Real>(std::sqrt(kept));
    M vh = svd.v.leftCols(keep).adjoint();
    M us = svd.u.leftCols(keep) *
           (svd.s.head(keep) / scale).template cast<Scalar>().asDiagonal();
    split_cols<Scalar>(vh, cols, phi.site(s + 1));
    split_rows<Scalar>(us, rows, phi.site(s));
    const auto& p = phi.site(s + 1);
    const auto& t = target.site(s + 1);
    right = t[0] * right * p[0].adjoint() + t[1] * right * p[1].adjoint();
    f = kept / target_norm2;
  }
  phi.set_center(lo);
  return f;
}

template <typename Scalar>
double fit_left_to_right(BasicMps<Scalar>& phi, const BasicMps<Scalar>& target,
                         std::size_t lo, std::size_t hi,
                         const TruncationPolicy& policy, double target_norm2) {
  using M = Mat<Scalar>;
  std::vector<M> right(hi - lo + 1);
  right[hi - lo] = M::Identity(target.site(hi)[0].cols(), phi.site(hi)[0].cols());
  for (std::size_t s = hi; s > lo + 1; --s) {
    const auto& p = phi.site(s);
    const auto& t = target.site(s);
    right[s - lo - 1] = t[0] * right[s - lo] * p[0].adjoint() +
                        t[1] * right[s - lo] * p[1].adjoint();
  }
  M left = M::Identity(phi.site(lo)[0].rows(), target.site(lo)[0].rows());
  double f = 0.0;
  for (std::size_t s = lo; s < hi; ++s) {
    M theta = two_site_block<Scalar>(left, target.site(s), target.site(s + 1),
                                     right[s + 1 - lo]);
    const Eigen::Index rows = theta.rows() / 2, cols = theta.cols() / 2;
    auto svd = thin_svd<Scalar>(theta);
    const auto keep = static_cast<Eigen::Index>(kept_count(svd.s, policy));
    const double kept = static_cast<double>(svd.s.head(keep).squaredNorm());
    const auto scale = static_cast<typename BasicMps<Scalar>::Real>(std::sqrt(kept));
    M u = svd.u.leftCols(keep);
    M sv = (svd.s.head(keep) / scale).template cast<Scalar>().asDiagonal() *
           svd.v.leftCols(keep).adjoint();
    split_rows<Scalar>(u, rows, phi.site(s));
    split_cols<Scalar>(sv, cols, phi.site(s + 1));
    const auto& p = phi.site(s);
    const auto& t = target.site(s);
    left = p[0].adjoint() * left * t[0] + p[1].adjoint() * left * t[1];
    f = kept / target_norm2;
  }
  phi.set_center(hi);
  return f;
}

}  // namespace detail

/// Applies `op` to `state` and truncates the result according to `policy`.
///
/// The operator is contracted exactly on its support window, the window is
/// brought to canonical form and cut back with an SVD sweep (ZipUp). With
/// the Variational method the ZipUp result seeds two-site fitting passes
/// against the exact product, stopping when the fidelity gain of a pass
/// drops below the tolerance. The returned state is normalized; the
/// discarded weight is 1 - |<result|O psi>|^2 / <O psi|O psi>.
template <typename Scalar>
CompressResult<Scalar> apply_mpo(BasicMps<Scalar> state,
                                 const BasicMpo<Scalar>& op,
                                 const TruncationPolicy& policy) {
  policy.validate();
  if (state.size() != op.size())
    throw std::invalid_argument("apply_mpo: operator acts on " +
                                std::to_string(op.size()) + " qubits, state has " +
                                std::to_string(state.size()));
  const auto window = op.support();
  if (!window) return {std::move(state), 0.0};
  const auto [lo, hi] = *window;

  state = canonicalize(std::move(state), lo);
  for (std::size_t s = lo; s <= hi; ++s)
    state.site(s) = detail::contract_site<Scalar>(op.site(s), state.site(s));
  if (lo == hi) {
    state.set_center(lo);
    return {normalize(std::move(state)), 0.0};
  }
  for (std::size_t s = hi; s > lo; --s) detail::right_orthonormalize(state, s);
  state.set_center(lo);
  const double target_norm2 = std::pow(norm(state), 2);
  if (!(target_norm2 > 0.0)) throw InvalidState("apply_mpo: zero-norm result");

  const auto* variational = std::get_if<Variational>(&policy.method);
  std::optional<BasicMps<Scalar>> target;
  if (variational) target = state;

  bool truncated = false;
  for (std::size_t s = lo; s < hi; ++s) {
    auto& a = state.site(s);
    const Eigen::Index left = a[0].rows();
    auto svd = detail::thin_svd<Scalar>(detail::stack_rows<Scalar>(a));
    const auto keep = static_cast<Eigen::Index>(kept_count(svd.s, policy));
    if (keep < svd.s.size() &&
        svd.s(keep) > kSingularValueFloor * svd.s(0))
      truncated = true;
    detail::Mat<Scalar> u = svd.u.leftCols(keep);
    detail::split_rows<Scalar>(u, left, a);
    detail::Mat<Scalar> sv = svd.s.head(keep).template cast<Scalar>().asDiagonal() *
                             svd.v.leftCols(keep).adjoint();
    auto& b = state.site(s + 1);
    b[0] = sv * b[0];
    b[1] = sv * b[1];
  }
  state.set_center(hi);
  double fid = std::pow(norm(state), 2) / target_norm2;

  if (variational && truncated) {
    bool right_to_left = true;
    for (int pass = 0; pass < variational->sweeps; ++pass) {
      BasicMps<Scalar> backup = state;
      const double f =
          right_to_left
              ? detail::fit_right_to_left(state, *target, lo, hi, policy, target_norm2)
              : detail::fit_left_to_right(state, *target, lo, hi, policy, target_norm2);
      if (f < fid) {
        state = std::move(backup);
        break;
      }
      const double gain = f - fid;
      fid = f;
      right_to_left = !right_to_left;
      if (gain < variational->tolerance) break;
    }
  }

  const double discarded = std::clamp(1.0 - fid, 0.0, 1.0);
  state = normalize(std::move(state));
  state.add_discarded_weight(discarded);
  return {std::move(state), discarded};
}

}  // namespace mpsim

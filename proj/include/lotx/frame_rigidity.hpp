// Copyright 2026 The lotx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// No-ancilla (p = q = 1) rigidity test.
//
// With p = q = 1 a local map is a pair of unitaries with U X_i V = e^{i phi_i} Y_i.
// If some pair has distinct nonzero singular values equal to those of its
// target, U and V are pinned up to one phase per Schmidt direction:
//   U = C^ diag(Theta, W1) A^*,   V^* = D^ diag(Theta, W2) B^*,
// where A^, B^, C^, D^ are completed Schmidt frames of that pair. Every other
// pair then yields checkable constraints: entry magnitudes and relative phases
// in the pinned block, and unitary invariants in the free block. The test
// proves impossibility when a constraint fails and otherwise tries to build
// an explicit certificate; it never claims feasibility without one.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lotx/channel.hpp"
#include "lotx/errors.hpp"
#include "lotx/finding.hpp"
#include "lotx/linalg.hpp"
#include "lotx/reduction.hpp"
#include "lotx/search.hpp"
#include "lotx/states.hpp"

namespace lotx {

struct RigidityResult {
  Finding finding = Finding::inconclusive;  // pass only together with a certificate
  std::size_t pinning_pair = 0;
  std::string condition;  // failed check when impossible
  std::optional<std::size_t> witness_pair;
  std::optional<std::size_t> second_pair;
  std::string detail;
  std::optional<UnitaryCertificate> certificate;
};

namespace detail {

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a > std::numbers::pi) a -= two_pi;
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

// Linear phase constraint sum_v coeff_v * node_v = delta (mod 2 pi), with
// coefficients summing to zero.
struct PhaseConstraint {
  std::vector<std::pair<std::size_t, int>> terms;
  double delta = 0.0;
  std::size_t pair_a = 0, pair_b = 0;
  std::string source;
};

// Union-find over phase nodes; pot[v] = node_v - node_root(v).
class PhaseGraph {
 public:
  explicit PhaseGraph(std::size_t nodes) : parent_(nodes), pot_(nodes, 0.0) {
    for (std::size_t v = 0; v < nodes; ++v) parent_[v] = v;
  }

  std::size_t find(std::size_t v) {
    if (parent_[v] == v) return v;
    const std::size_t r = find(parent_[v]);
    if (parent_[v] != r) {
      pot_[v] += pot_[parent_[v]];
      parent_[v] = r;
    }
    return r;
  }
  double potential(std::size_t v) {
    find(v);
    return pot_[v];
  }

  enum class Outcome { merged, consistent, violated, deferred };

  Outcome apply(const PhaseConstraint& c, double angle_tol) {
    // Rewrite in terms of component roots.
    std::vector<std::pair<std::size_t, int>> roots;
    double rhs = c.delta;
    for (auto [v, coeff] : c.terms) {
      const std::size_t r = find(v);
      rhs -= coeff * pot_[v];
      bool found = false;
      for (auto& rc : roots)
        if (rc.first == r) {
          rc.second += coeff;
          found = true;
        }
      if (!found) roots.emplace_back(r, coeff);
    }
    std::erase_if(roots, [](const auto& rc) { return rc.second == 0; });
    if (roots.empty()) {
      return std::abs(wrap_angle(rhs)) <= angle_tol ? Outcome::consistent : Outcome::violated;
    }
    if (roots.size() == 2 && std::abs(roots[0].second) == 1) {
      // root_a - root_b = s * rhs with s = coeff of root_a
      auto [ra, ca] = roots[0];
      auto [rb, cb] = roots[1];
      (void)cb;
      parent_[ra] = rb;
      pot_[ra] = wrap_angle(ca * rhs);
      return Outcome::merged;
    }
    return Outcome::deferred;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<double> pot_;
};

inline bool spectra_match(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

inline std::vector<double> to_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

/// Throws PreconditionError when no pair has distinct nonzero singular
/// values (after confirming every pair has matching spectra).
inline RigidityResult frame_rigidity_check(const TransformProblem& prob, const Tolerance& tol) {
  RigidityResult out;
  const std::size_t k = prob.k();
  std::vector<CMatrix> X(k), Y(k);
  for (std::size_t i = 0; i < k; ++i) {
    X[i] = prob.pairs[i].input.matrix();
    Y[i] = prob.pairs[i].output.matrix();
  }

  // With p = q = 1, X_i and Y_i are unitarily equivalent up to a phase.
  std::optional<std::size_t> pin;
  for (std::size_t i = 0; i < k; ++i) {
    const auto sx = nonzero_singular_values(X[i], tol);
    const auto sy = nonzero_singular_values(Y[i], tol);
    bool same = sx.size() == sy.size();
    for (std::size_t v = 0; same && v < sx.size(); ++v) same = tol.matches(sx[v], sy[v]);
    if (!same) {
      out.finding = Finding::impossible;
      out.condition = "no_ancilla_spectrum";
      out.witness_pair = i;
      out.detail = "singular values of X and Y differ, so no pair of unitaries relates them";
      return out;
    }
    const Svd s = svd(X[i]);
    const Index r = s.rank(tol);
    if (!pin && !has_degenerate_spectrum(s.values.head(r), tol)) pin = i;
  }
  if (!pin) throw PreconditionError("no pair has distinct nonzero singular values");
  out.pinning_pair = *pin;

  const Svd sx = svd(X[*pin]);
  const Svd sy = svd(Y[*pin]);
  const Index r = sx.rank(tol);
  const CMatrix A = sx.left.leftCols(r), B = sx.right.leftCols(r);
  const CMatrix C = sy.left.leftCols(r), D = sy.right.leftCols(r);
  CMatrix Ah(prob.m, prob.m), Bh(prob.n, prob.n), Ch(prob.m, prob.m), Dh(prob.n, prob.n);
  Ah << A, orthonormal_complement(A);
  Bh << B, orthonormal_complement(B);
  Ch << C, orthonormal_complement(C);
  Dh << D, orthonormal_complement(D);

  // Frame accuracy: perturbations of size eps move singular vectors by about
  // eps / gap, where gap is the smallest separation of the pinning spectrum.
  double gap = sx.values(r - 1);
  for (Index v = 0; v + 1 < r; ++v) gap = std::min(gap, sx.values(v) - sx.values(v + 1));
  const double frame_tol = 10.0 * (tol.abs_eps + tol.rel_eps) / std::max(gap, 1e-300);
  const double mag_tol = std::max(10.0 * tol.abs_eps, frame_tol);
  const double cut = std::max(std::sqrt(std::sqrt(tol.abs_eps)), 100.0 * frame_tol);
  const double angle_tol =
      (1e-6 + 4.0 * frame_tol / cut) * static_cast<double>(r + static_cast<Index>(k) + 2);

  std::vector<CMatrix> Xh(k), Yh(k);
  for (std::size_t i = 0; i < k; ++i) {
    Xh[i] = Ah.adjoint() * X[i] * Bh;
    Yh[i] = Ch.adjoint() * Y[i] * Dh;
  }
  const Index mb = prob.m - r, nb = prob.n - r;

  auto fail = [&](const std::string& cond, std::size_t i, std::optional<std::size_t> j,
                  const std::string& what) {
    out.finding = Finding::impossible;
    out.condition = cond;
    out.witness_pair = i;
    out.second_pair = j;
    out.detail = what;
    return out;
  };

  // Nodes: theta_0..theta_{r-1}, phi_0..phi_{k-1}; phi_pin is the reference.
  auto theta = [](Index a) { return static_cast<std::size_t>(a); };
  auto phi = [&](std::size_t i) { return static_cast<std::size_t>(r) + i; };
  const std::size_t anchor = phi(*pin);
  std::vector<detail::PhaseConstraint> constraints;
  constraints.push_back({{{anchor, 1}, {anchor, -1}}, 0.0, *pin, *pin, "anchor"});

  auto entry_arg = [](Complex z) { return std::arg(z); };

  for (std::size_t i = 0; i < k; ++i) {
    // Pinned block: Theta X_AA Theta^* = e^{i phi_i} Y_AA.
    const CMatrix xa = Xh[i].topLeftCorner(r, r), ya = Yh[i].topLeftCorner(r, r);
    for (Index a = 0; a < r; ++a)
      for (Index b = 0; b < r; ++b) {
        if (std::abs(std::abs(xa(a, b)) - std::abs(ya(a, b))) > mag_tol) {
          return fail("pinned_block_magnitude", i, std::nullopt,
                      "entry magnitudes of the pinned block differ");
        }
        if (std::abs(xa(a, b)) > cut) {
          detail::PhaseConstraint c;
          c.delta = entry_arg(ya(a, b)) - entry_arg(xa(a, b));
          c.terms = {{theta(a), 1}, {theta(b), -1}, {phi(i), -1}, {anchor, 1}};
          c.pair_a = c.pair_b = i;
          c.source = "pinned_block_phase";
          constraints.push_back(std::move(c));
        }
      }
    // Free block: W1 X_BB W2^* = e^{i phi_i} Y_BB.
    if (mb > 0 && nb > 0) {
      const auto s1 = detail::to_std(svd(Xh[i].bottomRightCorner(mb, nb)).values);
      const auto s2 = detail::to_std(svd(Yh[i].bottomRightCorner(mb, nb)).values);
      if (!detail::spectra_match(s1, s2, mag_tol)) {
        return fail("free_block_spectrum", i, std::nullopt,
                    "singular values of the unpinned block differ");
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      // Theta (X_i X_j^*)_AA Theta^* = e^{i(phi_i - phi_j)} (Y_i Y_j^*)_AA, and
      // Theta (X_i^* X_j)_AA Theta^* = e^{i(phi_j - phi_i)} (Y_i^* Y_j)_AA.
      const CMatrix px = (Xh[i] * Xh[j].adjoint()).topLeftCorner(r, r);
      const CMatrix py = (Yh[i] * Yh[j].adjoint()).topLeftCorner(r, r);
      const CMatrix qx = (Xh[i].adjoint() * Xh[j]).topLeftCorner(r, r);
      const CMatrix qy = (Yh[i].adjoint() * Yh[j]).topLeftCorner(r, r);
      for (Index a = 0; a < r; ++a)
        for (Index b = 0; b < r; ++b) {
          if (std::abs(std::abs(px(a, b)) - std::abs(py(a, b))) > mag_tol ||
              std::abs(std::abs(qx(a, b)) - std::abs(qy(a, b))) > mag_tol) {
            return fail("pinned_gram_magnitude", i, j,
                        "pinned-block Gram magnitudes differ between X and Y");
          }
          if (std::abs(px(a, b)) > cut) {
            constraints.push_back({{{theta(a), 1}, {theta(b), -1}, {phi(i), -1}, {phi(j), 1}},
                                   entry_arg(py(a, b)) - entry_arg(px(a, b)), i, j,
                                   "pinned_gram_phase"});
          }
          if (std::abs(qx(a, b)) > cut) {
            constraints.push_back({{{theta(a), 1}, {theta(b), -1}, {phi(j), -1}, {phi(i), 1}},
                                   entry_arg(qy(a, b)) - entry_arg(qx(a, b)), i, j,
                                   "pinned_gram_phase"});
          }
        }
      if (i == j) {
        // Unpinned blocks of X X^* and X^* X are unitarily similar.
        if (mb > 0) {
          const CMatrix hx = (Xh[i] * Xh[i].adjoint()).bottomRightCorner(mb, mb);
          const CMatrix hy = (Yh[i] * Yh[i].adjoint()).bottomRightCorner(mb, mb);
          if (!detail::spectra_match(detail::to_std(hermitian_eigenvalues(hx)),
                                     detail::to_std(hermitian_eigenvalues(hy)), mag_tol)) {
            return fail("free_gram_spectrum", i, std::nullopt,
                        "eigenvalues of the unpinned block of X X^* differ");
          }
        }
        if (nb > 0) {
          const CMatrix hx = (Xh[i].adjoint() * Xh[i]).bottomRightCorner(nb, nb);
          const CMatrix hy = (Yh[i].adjoint() * Yh[i]).bottomRightCorner(nb, nb);
          if (!detail::spectra_match(detail::to_std(hermitian_eigenvalues(hx)),
                                     detail::to_std(hermitian_eigenvalues(hy)), mag_tol)) {
            return fail("free_gram_spectrum", i, std::nullopt,
                        "eigenvalues of the unpinned block of X^* X differ");
          }
        }
      }
    }
  }

  detail::PhaseGraph graph(static_cast<std::size_t>(r) + k);
  std::vector<bool> done(constraints.size(), false);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      if (done[c]) continue;
      const auto res = graph.apply(constraints[c], angle_tol);
      if (res == detail::PhaseGraph::Outcome::violated) {
        return fail("phase_consistency", constraints[c].pair_a, constraints[c].pair_b,
                    "relative phases forced by " + constraints[c].source + " are inconsistent");
      }
      if (res != detail::PhaseGraph::Outcome::deferred) {
        done[c] = true;
        progress = progress || res == detail::PhaseGraph::Outcome::merged;
      }
    }
  }

  // All necessary checks passed: try to exhibit unitaries.
  CMatrix theta_diag = CMatrix::Identity(prob.m, prob.m);
  CMatrix theta_diag_b = CMatrix::Identity(prob.n, prob.n);
  const double anchor_pot = graph.potential(anchor);
  for (Index a = 0; a < r; ++a) {
    const Complex t = std::polar(1.0, graph.potential(theta(a)) - anchor_pot);
    theta_diag(a, a) = t;
    theta_diag_b(a, a) = t;
  }
  TransformProblem single = prob;
  single.p_max = single.q_max = 1;
  detail::SearchState st;
  st.p = st.q = 1;
  st.m = prob.m;
  st.n = prob.n;
  for (std::size_t i = 0; i < k; ++i) {
    st.A.push_back(X[i]);
    st.Y.push_back(Y[i]);
  }
  st.U = Ch * theta_diag * Ah.adjoint();
  st.V = Bh * theta_diag_b.adjoint() * Dh.adjoint();
  st.R.assign(k, CMatrix::Ones(1, 1));
  st.update_r();
  for (int sweep = 0; sweep < 200 && st.objective() > tol.abs_eps * tol.abs_eps; ++sweep) {
    st.update_u();
    st.update_v();
    st.update_r();
  }
  UnitaryCertificate cert{1, 1, st.U, st.V, st.R};
  if (verify_certificate(cert, single, tol).pass) {
    out.finding = Finding::pass;
    out.certificate = std::move(cert);
    out.detail = "certificate found, p=q=1";
  } else {
    out.finding = Finding::inconclusive;
    out.detail = "all rigidity constraints hold but no certificate was constructed";
  }
  return out;
}

}  // namespace lotx

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

// Certificate search by alternating exact block minimisation.
//
// For fixed ancilla sizes (p, q) the objective
//   f(U, V, R) = sum_i || U (E11 ⊗ X_i) V - R_i ⊗ Y_i ||^2
// is minimised one block at a time: U and V by orthogonal Procrustes, each
// R_i by projecting onto the unit sphere. Every step is an exact minimiser
// over its block, so f never increases. Results are only reported after
// verify_certificate accepts them.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "lotx/channel.hpp"
#include "lotx/errors.hpp"
#include "lotx/linalg.hpp"
#include "lotx/states.hpp"

namespace lotx {

struct SearchConfig {
  std::uint64_t seed = 0;
  int restarts = 32;
  int max_sweeps = 500;
  int p = 1;
  int q = 1;
  double convergence_eps = 1e-10;  // relative objective decrease counted as a stall
  bool keep_history = false;
};

struct SearchResult {
  bool certified = false;
  std::optional<UnitaryCertificate> certificate;
  std::optional<CertificateCheck> check;
  double best_objective = std::numeric_limits<double>::infinity();
  int best_restart = -1;
  int sweeps = 0;  // total over all restarts
  std::vector<std::vector<double>> histories;  // per restart, when keep_history
};

namespace detail {

struct SearchState {
  std::vector<CMatrix> A;  // E11 ⊗ X_i
  std::vector<CMatrix> Y;
  int p = 1, q = 1;
  Index m = 0, n = 0;
  CMatrix U, V;
  std::vector<CMatrix> R;

  CMatrix target(std::size_t i) const { return kron(R[i], Y[i]); }

  double objective() const {
    double f = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) f += (U * A[i] * V - target(i)).squaredNorm();
    return f;
  }

  // R_i maximises Re <R_i ⊗ Y_i, U A_i V> on the unit sphere.
  void update_r() {
    for (std::size_t i = 0; i < A.size(); ++i) {
      const CMatrix M = U * A[i] * V;
      CMatrix C(p, q);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < q; ++b)
          C(a, b) = (Y[i].conjugate().cwiseProduct(M.block(a * m, b * n, m, n))).sum();
      const double nc = C.norm();
      if (nc > 0.0) R[i] = C / nc;
    }
  }

  void update_u() {
    CMatrix S = CMatrix::Zero(p * m, p * m);
    for (std::size_t i = 0; i < A.size(); ++i) S += target(i) * (A[i] * V).adjoint();
    U = polar_unitary(S);
  }

  void update_v() {
    CMatrix S = CMatrix::Zero(q * n, q * n);
    for (std::size_t i = 0; i < A.size(); ++i) S += (U * A[i]).adjoint() * target(i);
    V = polar_unitary(S);
  }
};

}  // namespace detail

inline SearchResult search_certificate(const TransformProblem& prob, const SearchConfig& cfg,
                                       const Tolerance& tol) {
  if (cfg.p < 1 || cfg.q < 1 || cfg.restarts < 1 || cfg.max_sweeps < 1) {
    throw PreconditionError("search needs p, q, restarts and max_sweeps >= 1");
  }
  SearchResult out;
  detail::SearchState st;
  st.p = cfg.p;
  st.q = cfg.q;
  st.m = prob.m;
  st.n = prob.n;
  const CMatrix E = e11(cfg.p, cfg.q);
  for (const StatePair& sp : prob.pairs) {
    st.A.push_back(kron(E, sp.input.matrix()));
    st.Y.push_back(sp.output.matrix());
  }
  // Residual norm below abs_eps is comfortably inside the verifier threshold.
  const double target = tol.abs_eps * tol.abs_eps;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(restart));
    st.U = haar_unitary(rng, cfg.p * prob.m);
    st.V = haar_unitary(rng, cfg.q * prob.n);
    st.R.assign(prob.k(), CMatrix(cfg.p, cfg.q));
    st.update_r();
    double f = st.objective();
    std::vector<double> history{f};
    for (int sweep = 0; sweep < cfg.max_sweeps && f > target; ++sweep) {
      st.update_u();
      st.update_v();
      st.update_r();
      const double next = st.objective();
      ++out.sweeps;
      history.push_back(next);
      const bool stalled = f - next <= cfg.convergence_eps * f;
      f = next;
      if (stalled) break;
    }
    if (cfg.keep_history) out.histories.push_back(history);
    if (f < out.best_objective) {
      out.best_objective = f;
      out.best_restart = restart;
    }
    if (f <= 100.0 * target) {
      UnitaryCertificate cert{cfg.p, cfg.q, st.U, st.V, st.R};
      CertificateCheck chk = verify_certificate(cert, prob, tol);
      if (chk.pass) {
        out.certified = true;
        out.certificate = std::move(cert);
        out.check = std::move(chk);
        out.best_restart = restart;
        return out;
      }
    }
  }
  return out;
}

}  // namespace lotx

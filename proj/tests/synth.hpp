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

// Random generators shared by the property tests. Everything is seeded so a
// failing trial can be replayed from its index.

#pragma once

#include <complex>
#include <random>
#include <vector>

#include "lotx.hpp"

namespace lotx::testing {

inline std::mt19937_64 rng_for(std::uint64_t suite, std::uint64_t trial) {
  return std::mt19937_64(suite * 1000003ULL + trial);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex random_phase(std::mt19937_64& rng) {
  return std::polar(1.0, uniform(rng, -3.14159, 3.14159));
}

/// Unit-norm random state matrix of the given rank.
inline CMatrix random_state_matrix(std::mt19937_64& rng, Index m, Index n, Index rank) {
  CMatrix X = random_gaussian(rng, m, rank) * random_gaussian(rng, rank, n);
  return X / X.norm();
}

/// Orthonormal basis of a random d-dimensional subspace of C^dim.
inline CMatrix random_frame(std::mt19937_64& rng, Index dim, Index d) {
  return haar_unitary(rng, dim).leftCols(d);
}

/// A feasible problem together with the unitaries that witness it.
struct SynthesizedProblem {
  TransformProblem problem;
  UnitaryCertificate certificate;
};

/// Builds X_i from a chosen certificate: R_i ⊗ Y_i are drawn with column
/// spaces inside P_c ⊗ Q_c and row spaces inside P_r ⊗ Q_r. U sends the
/// first block of C^{mp} onto a space containing P_c ⊗ Q_c, V^* does the
/// same on Bob's side, and X_i is then the top-left block of
/// U^* (R_i ⊗ Y_i) V^*, so U (E11 ⊗ X_i) V = R_i ⊗ Y_i by construction.
/// With share > 1, consecutive groups of `share` pairs get the same target.
inline SynthesizedProblem synthesize_feasible(std::mt19937_64& rng, Index m, Index n, int p,
                                              int q, std::size_t k, std::size_t share = 1) {
  // Subspace dimensions with rho_c s_c <= m and rho_r s_r <= n.
  const int rho_c = uniform_int(rng, 1, std::min<int>(p, static_cast<int>(m)));
  const int rho_r = uniform_int(rng, 1, std::min<int>(q, static_cast<int>(n)));
  const int s_c = uniform_int(rng, 1, static_cast<int>(m) / rho_c);
  const int s_r = uniform_int(rng, 1, static_cast<int>(n) / rho_r);
  const CMatrix Pc = random_frame(rng, p, rho_c), Pr = random_frame(rng, q, rho_r);
  const CMatrix Qc = random_frame(rng, m, s_c), Qr = random_frame(rng, n, s_r);

  const CMatrix colspace = kron(Pc, Qc);  // mp x rho_c s_c
  const CMatrix rowspace = kron(Pr, Qr);  // nq x rho_r s_r

  auto extend = [&](const CMatrix& basis, Index total, Index first) {
    // Unitary whose first `first` columns contain span(basis), randomised.
    CMatrix comp = orthonormal_complement(basis);
    if (comp.cols() > 0) comp = comp * haar_unitary(rng, comp.cols());
    CMatrix W(total, total);
    const Index extra = first - basis.cols();
    CMatrix lead(total, first);
    lead << basis, comp.leftCols(extra);
    lead = lead * haar_unitary(rng, first);
    W << lead, comp.rightCols(comp.cols() - extra);
    return W;
  };
  const CMatrix U = extend(colspace, m * p, m);
  const CMatrix Vstar = extend(rowspace, n * q, n);

  SynthesizedProblem out;
  out.problem.m = m;
  out.problem.n = n;
  out.problem.p_max = p;
  out.problem.q_max = q;
  out.certificate.p = p;
  out.certificate.q = q;
  out.certificate.U = U;
  out.certificate.V = Vstar.adjoint();
  CMatrix Y;
  for (std::size_t i = 0; i < k; ++i) {
    CMatrix R = Pc * random_gaussian(rng, rho_c, rho_r) * Pr.adjoint();
    R /= R.norm();
    if (i % std::max<std::size_t>(share, 1) == 0) {
      Y = Qc * random_gaussian(rng, s_c, s_r) * Qr.adjoint();
      Y /= Y.norm();
    }
    const CMatrix full = U.adjoint() * kron(R, Y) * Vstar;
    const CMatrix X = full.topLeftCorner(m, n);
    out.problem.pairs.push_back(
        {BipartiteState::from_matrix(X), BipartiteState::from_matrix(Y), 1.0, std::nullopt});
    out.certificate.R.push_back(R);
  }
  return out;
}

/// Random problem with no feasibility guarantee.
inline TransformProblem random_problem(std::mt19937_64& rng, Index m, Index n, std::size_t k) {
  TransformProblem prob;
  prob.m = m;
  prob.n = n;
  for (std::size_t i = 0; i < k; ++i) {
    const Index rx = uniform_int(rng, 1, static_cast<int>(std::min(m, n)));
    const Index ry = uniform_int(rng, 1, static_cast<int>(rx));
    prob.pairs.push_back({BipartiteState::from_matrix(random_state_matrix(rng, m, n, rx)),
                          BipartiteState::from_matrix(random_state_matrix(rng, m, n, ry)), 1.0,
                          std::nullopt});
  }
  return prob;
}

}  // namespace lotx::testing

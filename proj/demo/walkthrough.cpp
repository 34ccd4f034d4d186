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

// Walkthrough of the library API on the two-pair ancilla example:
// a 2 x 4 system where x1 stays fixed and x2 = (e1 ⊗ (f1 + f3) + e2 ⊗ (f2 + f4)) / 2
// must become (e1 ⊗ f1 + e2 ⊗ f2) / sqrt 2.

#include <iostream>

#include "lotx.hpp"

int main() {
  using namespace lotx;
  const Tolerance tol;
  const TransformProblem prob =
      load_problem_file(std::string(LOTX_FIXTURES_DIR) + "/ex2p1_example1.json");

  // Cheap necessary conditions first.
  for (std::size_t i = 0; i < prob.k(); ++i) {
    const auto sx = nonzero_singular_values(prob.pairs[i].input.matrix(), tol);
    const auto sy = nonzero_singular_values(prob.pairs[i].output.matrix(), tol);
    const RatioWitness w = peel(sx, sy, tol);
    std::cout << "pair " << i << ": peel " << (w.feasible ? "feasible" : "infeasible")
              << ", ell = " << w.gammas.size() << "\n";
  }

  // Without ancillas the pinned frames of pair 0 rule the map out.
  const RigidityResult rr = frame_rigidity_check(prob, tol);
  std::cout << "no-ancilla rigidity: " << to_string(rr.finding) << " (" << rr.condition << ")\n";

  // With a qubit ancilla on Bob's side, the search finds and verifies unitaries.
  SearchConfig cfg;
  cfg.p = 1;
  cfg.q = 2;
  const SearchResult sr = search_certificate(prob, cfg, tol);
  std::cout << "search p=1 q=2: " << (sr.certified ? "certified" : "not found")
            << " after " << sr.sweeps << " sweeps\n";

  if (sr.certificate) {
    const KrausChannelPair ch = kraus_from_unitary(*sr.certificate, prob.m, prob.n);
    for (std::size_t i = 0; i < prob.k(); ++i) {
      const CVector& x = prob.pairs[i].input.amplitudes;
      const CVector& y = prob.pairs[i].output.amplitudes;
      const CMatrix rho = apply_channel(ch, x * x.adjoint(), tol);
      std::cout << "  fidelity of pair " << i << ": " << fidelity(y, rho) << "\n";
    }
  }

  // The full pipeline gives the same answer with an audit trail.
  const Verdict v = decide(prob, {}, tol);
  std::cout << "\n" << report_text(v);
  return 0;
}

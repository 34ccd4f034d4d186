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

// Acceptance suite: one PASS/FAIL line per criterion with its wall time.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lotx.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace lotx;
using lotx::testing::rng_for;
using lotx::testing::uniform_int;

namespace {

const std::string kFixtures = LOTX_FIXTURES_DIR;

// Collects failed expectations for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double a, double b, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << " (" << a << " vs " << b << ")";
    expect(std::abs(a - b) <= tol, os.str());
  }
  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

TransformProblem fixture(const std::string& name) { return load_problem_file(kFixtures + "/" + name); }

DecideOptions quick_options() {
  DecideOptions o;
  o.search.restarts = 2;
  o.search.max_sweeps = 200;
  return o;
}

void peeling(Checker& c) {
  const Tolerance tol;
  const std::vector<double> alpha{4, 2, 2, 1};
  struct Case {
    std::vector<double> beta;
    std::vector<double> gammas;  // empty = infeasible
  };
  const std::vector<Case> cases{{{2, 1}, {2, 1}},
                                {{4, 2}, {1, 0.5}},
                                {{2, 1, 1}, {}},
                                {{2, 0.5}, {}},
                                {{1, 1}, {}}};
  for (const Case& k : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const RatioWitness w = peel(alpha, k.beta, tol);
    const double ms = elapsed_ms(t0);
    c.expect(ms < 1.0, "peel runtime " + std::to_string(ms) + " ms");
    c.expect(w.feasible == !k.gammas.empty(), "peel feasibility");
    if (w.feasible) {
      c.expect(w.gammas == k.gammas, "peel gammas exact");
    }
  }
}

void final_example(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerance tol;
  const TransformProblem p = fixture("ex2p3_final.json");
  const SchmidtReduction red = schmidt_reduce(p, tol);
  c.expect(red.finding == Finding::pass, "reduction succeeds");
  const ConditionEResult ce = necessary_condition_e(red, tol);
  c.expect(ce.left.status == Status::certified, "left Gram side feasible");
  if (ce.left.completion) {
    c.expect(ce.left.completion->residual <= 1e-9, "left forced-entry residual");
    c.expect((ce.left.completion->M - ce.left.GX).norm() <= 1e-9, "left completion is G_X");
  } else {
    c.expect(false, "left completion present");
  }
  c.expect(ce.right.status == Status::impossible, "right Gram side impossible");
  c.expect(ce.right.zero_pattern.finding == Finding::impossible, "right zero-pattern witness");
  c.near(std::abs(ce.right.zero_pattern.gx), 0.5, 1e-12, "witness |G_X| = 1/2");
  c.expect(ce.right.zero_pattern.gy == Complex(0, 0), "witness G_Y = 0");
  const Verdict v = decide(p, {}, tol);
  c.expect(v.status == Status::impossible, "overall Impossible");
  c.expect(recheck_impossible(p, v, tol), "verdict rechecks");
  c.expect(elapsed_ms(t0) < 1000.0, "runtime under 1 s");
}

void joint_system(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerance tol;
  const TransformProblem joint = fixture("sec3_joint.json");
  const SinglePartyResult sp = single_party_transformable(joint.inputs(), joint.outputs(), tol);
  c.expect(sp.status == Status::certified, "single-party Certified");
  c.near(joint.pairs[0].output.amplitudes.dot(joint.pairs[1].output.amplitudes).real(),
         2.2 / std::sqrt(5.0), 1e-12, "<y1|y2> = 2.2/sqrt5");

  const std::vector<std::vector<double>> r_svals{{2 / std::sqrt(5.0), 1 / std::sqrt(5.0)},
                                                 {0.8, 0.6}};
  for (std::size_t i = 0; i < 2; ++i) {
    const Verdict v = decide_single_pair(joint.pairs[i].input, joint.pairs[i].output, tol);
    c.expect(v.status == Status::certified, "pair " + std::to_string(i) + " Certified");
    if (!v.certificate) continue;
    const RVector s = svd(v.certificate->R[0]).values;
    c.expect(s.size() == 2, "R has two singular values");
    if (s.size() == 2) {
      c.near(s(0), r_svals[i][0], 1e-9, "R singular value 1");
      c.near(s(1), r_svals[i][1], 1e-9, "R singular value 2");
    }
  }

  const Verdict v = decide(joint, {}, tol);
  c.expect(v.status == Status::impossible && v.stage == 2 &&
               v.condition == "cross_pair_eigenvalues",
           "joint Impossible at the cross-pair stage");
  const CMatrix X1 = joint.pairs[0].input.matrix(), X2 = joint.pairs[1].input.matrix();
  const CMatrix Y1 = joint.pairs[0].output.matrix(), Y2 = joint.pairs[1].output.matrix();
  std::vector<Complex> ex = eigenvalues(X1 * X2.adjoint());
  std::vector<Complex> ey = eigenvalues(Y1 * Y2.adjoint());
  auto nonzero = [](std::vector<Complex> v) {
    std::erase_if(v, [](Complex z) { return std::abs(z) < 1e-9; });
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    return v;
  };
  ex = nonzero(ex);
  ey = nonzero(ey);
  const std::vector<double> want{-0.384, -0.096, 0.096, 0.384};
  c.expect(ex.size() == 4, "four nonzero eigenvalues of X1 X2^*");
  for (std::size_t i = 0; i < std::min<std::size_t>(ex.size(), 4); ++i) {
    c.near(ex[i].real(), want[i], 1e-12, "eigenvalue real part");
    c.near(ex[i].imag(), 0.0, 1e-12, "eigenvalue imaginary part");
  }
  c.expect(!testing::scaled_union_oracle(ex, ey, 1e-9), "brute force finds no scaled partition");
  c.expect(elapsed_ms(t0) < 1000.0, "runtime under 1 s");
}

void ancilla_example(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerance tol;
  const TransformProblem p = fixture("ex2p1_example1.json");
  const UnitaryCertificate cert =
      load_certificate(read_text_file(kFixtures + "/ex2p1_certificate.json"));
  const CertificateCheck chk = verify_certificate(cert, p, tol);
  c.expect(chk.pass, "displayed certificate verifies: " + chk.reason);
  for (const PairCheck& pc : chk.pairs) {
    c.expect(pc.residual_c <= 1e-9 && pc.residual_b <= 1e-9, "certificate residual");
    c.near(pc.trace_r, 1.0, 1e-12, "tr R^* R");
  }
  const KrausChannelPair ch = kraus_from_unitary(cert, p.m, p.n);
  for (const StatePair& sp : p.pairs) {
    const CVector& x = sp.input.amplitudes;
    const CMatrix rho = apply_channel(ch, x * x.adjoint(), tol);
    c.expect(fidelity(sp.output.amplitudes, rho) >= 1.0 - 1e-8, "Kraus fidelity");
  }
  const RigidityResult rr = frame_rigidity_check(fixture("ex2p1_noancilla.json"), tol);
  c.expect(rr.finding == Finding::impossible, "rigidity at p = q = 1 is Impossible");

  const auto ts = std::chrono::steady_clock::now();
  SearchConfig cfg;
  cfg.p = 1;
  cfg.q = 2;
  cfg.restarts = 32;
  cfg.seed = 0;
  const SearchResult sr = search_certificate(p, cfg, tol);
  c.expect(sr.certified, "search at p = 1, q = 2 Certified");
  c.expect(elapsed_ms(ts) < 30000.0, "search under 30 s");
  (void)t0;
}

void properties(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerance tol;
  double worst_vec = 0.0;
  for (int t = 0; t < 200; ++t) {
    auto rng = rng_for(1, t);
    const Index a = uniform_int(rng, 1, 4), b = uniform_int(rng, 1, 4), d = uniform_int(rng, 1, 4),
                e = uniform_int(rng, 1, 4);
    const CMatrix A = random_gaussian(rng, a, b), X = random_gaussian(rng, b, d),
                  B = random_gaussian(rng, d, e);
    const CVector lhs = matrix_to_vec(A * X * B);
    const CVector rhs = kron(A, CMatrix(B.transpose())) * matrix_to_vec(X);
    worst_vec = std::max(worst_vec, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
  }
  c.expect(worst_vec <= 1e-12, "vec/Kronecker identity residual " + std::to_string(worst_vec));

  int impossible = 0;
  double worst_form = 0.0, worst_trace = 0.0, worst_neg = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto rng = rng_for(2, t);
    const auto s = testing::synthesize_feasible(rng, uniform_int(rng, 1, 3), uniform_int(rng, 1, 3),
                                                uniform_int(rng, 1, 2), uniform_int(rng, 1, 2),
                                                static_cast<std::size_t>(uniform_int(rng, 1, 3)));
    worst_form = std::max(worst_form, testing::certificate_forms(s.certificate, s.problem).worst());
    const Verdict v = decide(s.problem, quick_options(), tol);
    if (v.status == Status::impossible) ++impossible;
    if (v.certificate) {
      worst_form = std::max(worst_form, testing::certificate_forms(*v.certificate, s.problem).worst());
    }
    const KrausChannelPair ch = kraus_from_unitary(s.certificate, s.problem.m, s.problem.n);
    for (const StatePair& sp : s.problem.pairs) {
      const CVector& x = sp.input.amplitudes;
      const CMatrix rho = apply_channel(ch, x * x.adjoint(), tol);
      worst_trace = std::max(worst_trace, std::abs(rho.trace().real() - 1.0));
      worst_neg = std::max(worst_neg, -min_hermitian_eigenvalue(rho));
    }
  }
  c.expect(impossible == 0, std::to_string(impossible) + " false negatives");
  c.expect(worst_form <= 1e-7, "certificate forms disagree by " + std::to_string(worst_form));
  c.expect(worst_trace <= 1e-7, "channel trace error " + std::to_string(worst_trace));
  c.expect(worst_neg <= 1e-7, "channel output negativity " + std::to_string(worst_neg));

  int kept = 0, agree = 0;
  for (int t = 0; kept < 50 && t < 2000; ++t) {
    auto rng = rng_for(3, t);
    const CMatrix F = testing::random_four_cycle(rng, t % 2 == 1);
    const double oracle = testing::grid_oracle(F);
    if (oracle > -0.04 && oracle < 0.005) continue;
    ++kept;
    CMatrix GX = F;
    GX(0, 2) = GX(2, 0) = GX(1, 3) = GX(3, 1) = 0.0;
    const CorrelationCompletion cc =
        complete_correlation(GX, testing::four_cycle_pattern(), tol, 5000);
    const CompletionStatus want =
        oracle >= 0.005 ? CompletionStatus::feasible : CompletionStatus::infeasible;
    agree += cc.status == want ? 1 : 0;
  }
  c.expect(kept == 50 && agree == 50,
           "completion matches grid oracle on " + std::to_string(agree) + "/" +
               std::to_string(kept));
  c.expect(elapsed_ms(t0) < 300000.0, "suite under 5 min");
}

void mixed(Checker& c) {
  const Tolerance tol;
  int agree = 0;
  for (int t = 0; t < 20; ++t) {
    auto rng = rng_for(4, t);
    const std::size_t comps = static_cast<std::size_t>(uniform_int(rng, 1, 2));
    const std::size_t inputs = static_cast<std::size_t>(uniform_int(rng, 1, 2));
    const auto s = testing::synthesize_feasible(rng, 2, 2, uniform_int(rng, 1, 2),
                                                uniform_int(rng, 1, 2), comps * inputs, comps);
    MixedInputProblem mp;
    mp.m = mp.n = 2;
    mp.p_max = s.problem.p_max;
    mp.q_max = s.problem.q_max;
    for (std::size_t i = 0; i < inputs; ++i) {
      MixedInput a;
      const double w = testing::uniform(rng, 0.2, 0.8);
      for (std::size_t j = 0; j < comps; ++j) {
        const double wj = comps == 1 ? 1.0 : (j == 0 ? w : 1.0 - w);
        a.components.push_back(std::sqrt(wj) * s.problem.pairs[i * comps + j].input.amplitudes);
      }
      mp.inputs.push_back(a);
      mp.outputs.push_back(s.problem.pairs[i * comps].output);
    }
    const Verdict a = decide(mixed_reduction(mp, tol), quick_options(), tol);
    const Verdict b = decide(s.problem, quick_options(), tol);
    agree += (a.status == b.status && a.stage == b.stage && a.status != Status::impossible) ? 1 : 0;
  }
  c.expect(agree == 20, "mixed verdict agrees on " + std::to_string(agree) + "/20");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria{
      {"peeling example reproduced exactly", peeling},
      {"final two-pair example: Gram sides and verdict", final_example},
      {"joint-system example: single party, pairs, joint", joint_system},
      {"ancilla example: certificate, channel, rigidity, search", ancilla_example},
      {"property suite", properties},
      {"mixed inputs reduce to pure components", mixed},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double ms = elapsed_ms(t0);
    std::printf("%s criterion %zu: %s (%.1f ms)\n", c.ok() ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), ms);
    for (const auto& f : c.failures()) std::printf("    %s\n", f.c_str());
    failed += c.ok() ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

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

// Staged decision procedure and report rendering.
//
// Stages run cheapest first and stop at the first definitive answer:
//   1. per-pair rank divisibility, peeling and the ancilla bound
//   2. cross-pair eigenvalue condition
//   3. Schmidt reduction and the pooled single-party Gram tests
//   4. no-ancilla rigidity (decisive only when p_max = q_max = 1)
//   5. certificate search over ancilla sizes within the bounds
// Impossible always names the failed condition and its witness; Certified
// always carries a certificate that passed verify_certificate.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lotx/channel.hpp"
#include "lotx/errors.hpp"
#include "lotx/finding.hpp"
#include "lotx/frame_rigidity.hpp"
#include "lotx/gram.hpp"
#include "lotx/linalg.hpp"
#include "lotx/reduction.hpp"
#include "lotx/search.hpp"
#include "lotx/spectral.hpp"
#include "lotx/states.hpp"

namespace lotx {

struct TraceEntry {
  std::string check;
  std::vector<std::size_t> pairs;
  Finding outcome = Finding::pass;
  double elapsed_ms = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};

struct Verdict {
  Status status = Status::inconclusive;
  int stage = 0;
  std::string condition;
  std::string scope = "unconditional";  // or "within_bounds"
  std::string message;
  nlohmann::json witness = nlohmann::json::object();
  std::vector<TraceEntry> trace;
  std::optional<UnitaryCertificate> certificate;
  std::vector<std::string> warnings;
  std::vector<NormalizationRecord> normalization;
  int p_max = 0;
  int q_max = 0;
};

struct DecideOptions {
  SearchConfig search;  // p and q are overwritten per ancilla size tried
  int max_iters = 10000;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline nlohmann::json complex_json(Complex z) { return {z.real(), z.imag()}; }

inline nlohmann::json complex_list_json(const std::vector<Complex>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Complex z : v) a.push_back(complex_json(z));
  return a;
}

inline nlohmann::json provenance_json(const RankOneSubproblem::Provenance& p) {
  return {{"pair", p.pair}, {"block", p.block}, {"target", p.target},
          {"schmidt_index", p.schmidt_index}};
}

inline nlohmann::json peel_json(const RatioWitness& w, const std::vector<double>& alpha,
                                const std::vector<double>& beta) {
  nlohmann::json j{{"alpha", alpha}, {"beta", beta}, {"gammas", w.gammas},
                   {"feasible", w.feasible}};
  if (w.failure_step) j["failure_step"] = *w.failure_step;
  return j;
}

inline nlohmann::json side_json(const SinglePartyResult& r, const RankOneSubproblem& sub,
                                const std::string& side) {
  nlohmann::json j{{"side", side}, {"status", to_string(r.status)}, {"size", r.GX.rows()}};
  if (r.zero_pattern.finding == Finding::impossible) {
    const auto [a, b] = *r.zero_pattern.witness;
    j["method"] = "zero_pattern";
    j["entry"] = {a, b};
    j["gx"] = complex_json(r.zero_pattern.gx);
    j["gy"] = complex_json(r.zero_pattern.gy);
    j["provenance"] = {provenance_json(sub.provenance[static_cast<std::size_t>(a)]),
                       provenance_json(sub.provenance[static_cast<std::size_t>(b)])};
  } else if (r.completion) {
    const CorrelationCompletion& c = *r.completion;
    j["method"] = c.status != CompletionStatus::infeasible ? "completion"
                  : c.certificate_indices.empty()          ? "separating_matrix"
                                                           : "forced_submatrix";
    j["completion"] = to_string(c.status);
    j["min_eigenvalue"] = c.min_eigenvalue;
    j["iterations"] = c.iterations;
    j["residual"] = c.residual;
    if (!c.certificate_indices.empty()) {
      j["indices"] = c.certificate_indices;
      j["certificate_min_eigenvalue"] = min_hermitian_eigenvalue(c.certificate);
    }
    if (!c.reason.empty()) j["reason"] = c.reason;
  }
  return j;
}

inline Verdict impossible(Verdict v, int stage, std::string condition, std::string message,
                          nlohmann::json witness, std::string scope = "unconditional") {
  v.status = Status::impossible;
  v.stage = stage;
  v.condition = std::move(condition);
  v.message = std::move(message);
  v.witness = std::move(witness);
  v.scope = std::move(scope);
  return v;
}

inline Verdict certified(Verdict v, int stage, std::string condition, UnitaryCertificate cert,
                         std::string message) {
  v.status = Status::certified;
  v.stage = stage;
  v.condition = std::move(condition);
  v.message = std::move(message);
  v.witness = {{"p", cert.p}, {"q", cert.q}};
  v.certificate = std::move(cert);
  return v;
}

// Per-pair stage 1 checks; returns a verdict when one fails.
struct PairSpectra {
  SchmidtForm x_form, y_form;
  RankDivisibility ranks;
  RatioWitness peel;
  std::vector<double> alpha, beta;
};

inline std::optional<Verdict> stage_one_pair(Verdict& v, const StatePair& sp, std::size_t i,
                                             int ancilla_limit, const Tolerance& tol,
                                             PairSpectra& out) {
  const CMatrix X = sp.input.matrix(), Y = sp.output.matrix();
  Stopwatch sw;
  out.ranks = rank_divisibility(X, Y, tol);
  nlohmann::json rd{{"rank_x", out.ranks.rank_x}, {"rank_y", out.ranks.rank_y}};
  v.trace.push_back({"rank_divisibility", {i},
                     out.ranks.possible() ? Finding::pass : Finding::impossible, sw.ms(), rd});
  if (!out.ranks.possible()) {
    rd["pair"] = i;
    return impossible(v, 1, "rank_divisibility", "rank(X) is not a multiple of rank(Y)", rd);
  }
  Stopwatch sw2;
  out.x_form = schmidt_form(X, tol);
  out.y_form = schmidt_form(Y, tol);
  out.alpha = detail::to_std(out.x_form.coefficients);
  out.beta = detail::to_std(out.y_form.coefficients);
  out.peel = lotx::peel(out.alpha, out.beta, tol);
  nlohmann::json pj = peel_json(out.peel, out.alpha, out.beta);
  v.trace.push_back(
      {"peel", {i}, out.peel.feasible ? Finding::pass : Finding::impossible, sw2.ms(), pj});
  if (!out.peel.feasible) {
    pj["pair"] = i;
    return impossible(v, 1, "peel",
                      "singular values of X are not a union of scaled copies of those of Y", pj);
  }
  const int ell = static_cast<int>(out.peel.gammas.size());
  if (ancilla_limit > 0 && ell > ancilla_limit) {
    nlohmann::json aj{{"pair", i}, {"ell", ell}, {"min_bound", ancilla_limit}};
    v.trace.push_back({"ancilla_bound", {i}, Finding::impossible, 0.0, aj});
    return impossible(v, 1, "ancilla_bound",
                      "R must have rank " + std::to_string(ell) + ", above min(p_max, q_max)", aj,
                      "within_bounds");
  }
  return std::nullopt;
}

// Single-pair certificate with p = q = ell and R = diag(gamma).
inline UnitaryCertificate single_pair_certificate(const PairSpectra& s, Index m, Index n) {
  const int ell = static_cast<int>(s.peel.gammas.size());
  // Least-squares gammas from the matched values, then exact normalisation.
  std::vector<double> num(static_cast<std::size_t>(ell), 0.0), den(num);
  for (const PeelMatch& mt : s.peel.matches) {
    num[mt.block] += s.alpha[mt.alpha_index] * s.beta[mt.beta_index];
    den[mt.block] += s.beta[mt.beta_index] * s.beta[mt.beta_index];
  }
  CMatrix R = CMatrix::Zero(ell, ell);
  for (int u = 0; u < ell; ++u) R(u, u) = num[static_cast<std::size_t>(u)] / den[static_cast<std::size_t>(u)];
  R /= R.norm();

  const Index cols = static_cast<Index>(s.peel.matches.size());
  CMatrix fa(m * ell, cols), tc(m * ell, cols), fb(n * ell, cols), td(n * ell, cols);
  Index c = 0;
  for (const PeelMatch& mt : s.peel.matches) {
    const CVector eu = CVector::Unit(ell, static_cast<Index>(mt.block));
    const CVector e1 = CVector::Unit(ell, 0);
    fa.col(c) = kron(e1, CVector(s.x_form.left.col(static_cast<Index>(mt.alpha_index))));
    tc.col(c) = kron(eu, CVector(s.y_form.left.col(static_cast<Index>(mt.beta_index))));
    fb.col(c) = kron(e1, CVector(s.x_form.right.col(static_cast<Index>(mt.alpha_index))));
    td.col(c) = kron(eu, CVector(s.y_form.right.col(static_cast<Index>(mt.beta_index))));
    ++c;
  }
  UnitaryCertificate cert;
  cert.p = cert.q = ell;
  cert.U = complete_partial_isometry(fa, tc);
  cert.V = complete_partial_isometry(fb, td).adjoint();
  cert.R = {R};
  return cert;
}

inline Verdict finish_single_pair(Verdict v, const TransformProblem& prob, const PairSpectra& s,
                                  const Tolerance& tol) {
  Stopwatch sw;
  UnitaryCertificate cert = single_pair_certificate(s, prob.m, prob.n);
  const CertificateCheck chk = verify_certificate(cert, prob, tol);
  nlohmann::json d{{"p", cert.p}, {"q", cert.q}, {"verified", chk.pass}};
  v.trace.push_back({"single_pair_construction", {0},
                     chk.pass ? Finding::pass : Finding::inconclusive, sw.ms(), d});
  if (chk.pass) {
    return certified(std::move(v), 1, "single_pair_construction", std::move(cert),
                     "spectral condition holds; explicit unitaries constructed");
  }
  v.status = Status::inconclusive;
  v.stage = 1;
  v.condition = "single_pair_construction";
  v.message = "constructed unitaries failed verification (" + chk.reason + ")";
  return v;
}

}  // namespace detail

/// Complete decision for one pair: Impossible or Certified with p = q = ell.
inline Verdict decide_single_pair(const BipartiteState& x, const BipartiteState& y,
                                  const Tolerance& tol = {}) {
  TransformProblem prob;
  prob.m = x.m;
  prob.n = x.n;
  prob.pairs.push_back({x, y, 1.0, std::nullopt});
  prob.validate(tol);
  Verdict v;
  detail::PairSpectra s;
  if (auto early = detail::stage_one_pair(v, prob.pairs[0], 0, 0, tol, s)) return *early;
  prob.p_max = prob.q_max = static_cast<int>(s.peel.gammas.size());
  v.p_max = prob.p_max;
  v.q_max = prob.q_max;
  return detail::finish_single_pair(std::move(v), prob, s, tol);
}

/// Ancilla sizes tried by the search, smallest p * q first.
inline std::vector<std::pair<int, int>> ancilla_schedule(int p_max, int q_max, int min_rank) {
  std::vector<std::pair<int, int>> out;
  for (int p = std::max(1, min_rank); p <= p_max; ++p)
    for (int q = std::max(1, min_rank); q <= q_max; ++q) out.emplace_back(p, q);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first * a.second < b.first * b.second;
  });
  return out;
}

inline Verdict decide(const TransformProblem& prob, const DecideOptions& opt = {},
                      const Tolerance& tol = {}) {
  tol.validate();
  prob.validate(tol);
  Verdict v;
  v.normalization = prob.normalization;
  v.p_max = prob.p_max;
  v.q_max = prob.q_max;
  const int limit = std::min(prob.p_max, prob.q_max);

  // Stage 1.
  std::vector<detail::PairSpectra> spectra(prob.k());
  int max_ell = 1;
  for (std::size_t i = 0; i < prob.k(); ++i) {
    if (auto early = detail::stage_one_pair(v, prob.pairs[i], i, limit, tol, spectra[i])) {
      return *early;
    }
    max_ell = std::max(max_ell, static_cast<int>(spectra[i].peel.gammas.size()));
  }
  if (prob.k() == 1) return detail::finish_single_pair(std::move(v), prob, spectra[0], tol);

  // Stage 2.
  for (std::size_t i = 0; i < prob.k(); ++i)
    for (std::size_t j = i + 1; j < prob.k(); ++j) {
      detail::Stopwatch sw;
      const CrossPairResult cp =
          cross_pair_test(prob.pairs[i].input.matrix(), prob.pairs[j].input.matrix(),
                          prob.pairs[i].output.matrix(), prob.pairs[j].output.matrix(), tol,
                          std::to_string(i) + "," + std::to_string(j));
      nlohmann::json d{{"x_eigenvalues", detail::complex_list_json(cp.x_side.values)},
                       {"y_eigenvalues", detail::complex_list_json(cp.y_side.values)}};
      if (!cp.gammas.empty()) d["gammas"] = detail::complex_list_json(cp.gammas);
      if (!cp.reason.empty()) d["reason"] = cp.reason;
      v.trace.push_back({"cross_pair_eigenvalues", {i, j}, cp.finding, sw.ms(), d});
      if (cp.finding == Finding::impossible) {
        d["pairs"] = {i, j};
        return detail::impossible(
            v, 2, "cross_pair_eigenvalues",
            "eigenvalues of X_i X_j^* are not a union of scaled copies of those of Y_i Y_j^*", d);
      }
    }

  // Stage 3.
  {
    detail::Stopwatch sw;
    const SchmidtReduction red = schmidt_reduce(prob, tol);
    v.warnings.insert(v.warnings.end(), red.warnings.begin(), red.warnings.end());
    v.trace.push_back({"schmidt_reduce", {}, red.finding, sw.ms(),
                       {{"subproblems", red.pooled.size()}, {"degenerate", red.degenerate}}});
    detail::Stopwatch sw2;
    const ConditionEResult ce = necessary_condition_e(red, tol, opt.max_iters);
    const double ms = sw2.ms();
    const nlohmann::json left = detail::side_json(ce.left, red.pooled, "left");
    const nlohmann::json right = detail::side_json(ce.right, red.pooled, "right");
    auto side_finding = [&](const SinglePartyResult& r) {
      if (r.status == Status::impossible) {
        return ce.downgraded ? Finding::inconclusive : Finding::impossible;
      }
      return r.status == Status::inconclusive ? Finding::inconclusive : Finding::pass;
    };
    v.trace.push_back({"gram_left", {}, side_finding(ce.left), ms / 2, left});
    v.trace.push_back({"gram_right", {}, side_finding(ce.right), ms / 2, right});
    if (ce.downgraded) {
      v.warnings.push_back("Gram test failed on the " + ce.failed_side +
                           " side but the Schmidt grouping is not unique; not treated as proof");
    } else if (ce.finding == Finding::impossible) {
      const bool is_left = ce.failed_side == "left";
      return detail::impossible(v, 3, is_left ? "gram_left" : "gram_right",
                                "no correlation matrix completes the pooled Gram data on the " +
                                    ce.failed_side + " side",
                                is_left ? left : right);
    }
  }

  // Stage 4.
  bool no_ancilla_ruled_out = false;
  {
    detail::Stopwatch sw;
    try {
      const RigidityResult rr = frame_rigidity_check(prob, tol);
      nlohmann::json d{{"pinning_pair", rr.pinning_pair},
                       {"detail", rr.detail},
                       {"decisive", prob.p_max == 1 && prob.q_max == 1}};
      if (!rr.condition.empty()) d["condition"] = rr.condition;
      if (rr.witness_pair) d["witness_pair"] = *rr.witness_pair;
      if (rr.second_pair) d["second_pair"] = *rr.second_pair;
      v.trace.push_back({"frame_rigidity", {}, rr.finding, sw.ms(), d});
      if (rr.finding == Finding::pass && rr.certificate) {
        return detail::certified(std::move(v), 4, "frame_rigidity", *rr.certificate,
                                 "no-ancilla certificate found and verified");
      }
      if (rr.finding == Finding::impossible) {
        no_ancilla_ruled_out = true;
        if (prob.p_max == 1 && prob.q_max == 1) {
          return detail::impossible(v, 4, "frame_rigidity",
                                    "no pair of unitaries carries every X_i to a phase of Y_i", d,
                                    "within_bounds");
        }
      }
    } catch (const PreconditionError& e) {
      v.trace.push_back(
          {"frame_rigidity", {}, Finding::inconclusive, sw.ms(), {{"detail", e.what()}}});
    }
  }

  // Stage 5.
  for (auto [p, q] : ancilla_schedule(prob.p_max, prob.q_max, max_ell)) {
    if (p == 1 && q == 1 && no_ancilla_ruled_out) continue;
    detail::Stopwatch sw;
    SearchConfig cfg = opt.search;
    cfg.p = p;
    cfg.q = q;
    cfg.keep_history = false;
    SearchResult sr = search_certificate(prob, cfg, tol);
    v.trace.push_back({"search", {}, sr.certified ? Finding::pass : Finding::inconclusive, sw.ms(),
                       {{"p", p},
                        {"q", q},
                        {"seed", cfg.seed},
                        {"restarts", cfg.restarts},
                        {"sweeps", sr.sweeps},
                        {"best_objective", sr.best_objective},
                        {"best_restart", sr.best_restart}}});
    if (sr.certified) {
      return detail::certified(std::move(v), 5, "search", std::move(*sr.certificate),
                               "certificate found by search and verified");
    }
  }
  v.status = Status::inconclusive;
  v.stage = 5;
  v.condition = "search_exhausted";
  v.message = "no necessary condition failed and no certificate was found within the bounds";
  return v;
}

/// Re-runs only the check named by an Impossible verdict and reports whether
/// it fails again.
inline bool recheck_impossible(const TransformProblem& prob, const Verdict& v,
                               const Tolerance& tol = {}) {
  if (v.status != Status::impossible) return false;
  const std::string& c = v.condition;
  if (c == "rank_divisibility" || c == "peel" || c == "ancilla_bound") {
    const std::size_t i = v.witness.at("pair").get<std::size_t>();
    Verdict scratch;
    detail::PairSpectra s;
    const int limit = c == "ancilla_bound" ? std::min(prob.p_max, prob.q_max) : 0;
    auto again = detail::stage_one_pair(scratch, prob.pairs.at(i), i, limit, tol, s);
    return again && again->condition == c;
  }
  if (c == "cross_pair_eigenvalues") {
    const auto ij = v.witness.at("pairs").get<std::vector<std::size_t>>();
    const auto& a = prob.pairs.at(ij.at(0));
    const auto& b = prob.pairs.at(ij.at(1));
    return cross_pair_test(a.input.matrix(), b.input.matrix(), a.output.matrix(),
                           b.output.matrix(), tol)
               .finding == Finding::impossible;
  }
  if (c == "gram_left" || c == "gram_right") {
    const SchmidtReduction red = schmidt_reduce(prob, tol);
    const auto& sub = red.pooled;
    const SinglePartyResult r =
        c == "gram_left" ? single_party_transformable(sub.left_sources, sub.left_targets, tol)
                         : single_party_transformable(sub.right_sources, sub.right_targets, tol);
    return r.status == Status::impossible;
  }
  if (c == "frame_rigidity") {
    return frame_rigidity_check(prob, tol).finding == Finding::impossible;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Rendering.
// ---------------------------------------------------------------------------

inline nlohmann::json report_json(const Verdict& v) {
  nlohmann::json j;
  j["status"] = to_string(v.status);
  j["reason"] = {{"stage", v.stage},
                 {"condition", v.condition},
                 {"scope", v.scope},
                 {"message", v.message},
                 {"witness", v.witness}};
  j["bounds"] = {{"p_max", v.p_max}, {"q_max", v.q_max}};
  j["trace"] = nlohmann::json::array();
  for (const TraceEntry& t : v.trace) {
    j["trace"].push_back({{"check", t.check},
                          {"pairs", t.pairs},
                          {"outcome", to_string(t.outcome)},
                          {"elapsed_ms", t.elapsed_ms},
                          {"detail", t.detail}});
  }
  j["certificate"] = v.certificate ? certificate_to_json(*v.certificate) : nlohmann::json();
  j["warnings"] = v.warnings;
  j["normalization"] = nlohmann::json::array();
  for (const auto& n : v.normalization) {
    j["normalization"].push_back({{"where", n.where}, {"original_norm", n.original_norm}});
  }
  return j;
}

inline std::string report_text(const Verdict& v) {
  std::ostringstream os;
  os << to_string(v.status);
  if (!v.condition.empty()) os << " (stage " << v.stage << ", " << v.condition << ")";
  os << "\n";
  if (!v.message.empty()) os << "  " << v.message << "\n";
  if (v.scope == "within_bounds") {
    os << "  scope: p <= " << v.p_max << ", q <= " << v.q_max << "\n";
  }
  if (!v.witness.empty()) os << "  witness: " << v.witness.dump() << "\n";
  for (const auto& n : v.normalization) {
    os << "  normalized " << n.where << " (norm was " << n.original_norm << ")\n";
  }
  for (const auto& w : v.warnings) os << "  warning: " << w << "\n";
  os << "trace:\n";
  for (const TraceEntry& t : v.trace) {
    os << "  " << t.check;
    if (!t.pairs.empty()) {
      os << "[";
      for (std::size_t a = 0; a < t.pairs.size(); ++a) os << (a ? "," : "") << t.pairs[a];
      os << "]";
    }
    os << ": " << to_string(t.outcome) << " (" << t.elapsed_ms << " ms)\n";
  }
  if (v.certificate) {
    os << "certificate: p=" << v.certificate->p << ", q=" << v.certificate->q << "\n";
  }
  return os.str();
}

}  // namespace lotx

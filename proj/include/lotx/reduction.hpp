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

// Schmidt reduction of a transformation problem to rank-one subproblems.
//
// Each pair (X_i, Y_i) must pass rank divisibility and peeling; the peel
// assignment then sends every Schmidt triple (alpha_k, a_k, b_k) of X_i to a
// triple (beta_v, c_v, d_v) of Y_i. A local map must carry [a_k; 0] to
// zeta ⊗ c_v on Alice's side and [b_k; 0] to eta ⊗ d_v on Bob's side, so the
// pooled families {a_k -> c_v} and {b_k -> d_v} must each pass the
// single-party Gram test.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lotx/errors.hpp"
#include "lotx/finding.hpp"
#include "lotx/gram.hpp"
#include "lotx/linalg.hpp"
#include "lotx/spectral.hpp"
#include "lotx/states.hpp"

namespace lotx {

/// X = sum_v coefficients(v) * left.col(v) * right.col(v)^*, truncated to
/// the numerical rank. Each left vector has its largest-magnitude component
/// (first index on ties) real positive; the right vector carries the same
/// phase so the rank-one terms are unchanged.
struct SchmidtForm {
  RVector coefficients;
  CMatrix left;
  CMatrix right;

  Index rank() const { return coefficients.size(); }
  CMatrix reconstruct() const {
    return left * coefficients.cast<Complex>().asDiagonal() * right.adjoint();
  }
};

inline SchmidtForm schmidt_form(const CMatrix& X, const Tolerance& tol) {
  const Svd s = svd(X);
  const Index r = s.rank(tol);
  SchmidtForm out{s.values.head(r), s.left.leftCols(r), s.right.leftCols(r)};
  for (Index v = 0; v < r; ++v) {
    const double top = out.left.col(v).cwiseAbs().maxCoeff();
    Index at = 0;
    while (std::abs(out.left(at, v)) < top * (1.0 - 1e-12)) ++at;
    const Complex phase = std::conj(out.left(at, v)) / std::abs(out.left(at, v));
    out.left.col(v) *= phase;
    out.right.col(v) *= phase;
    out.left(at, v) = std::abs(out.left(at, v));
  }
  return out;
}

/// True if two nonzero Schmidt coefficients are closer than sqrt(rel_eps)
/// times the largest (the singular vectors are then not well determined).
inline bool has_degenerate_spectrum(const RVector& s, const Tolerance& tol) {
  if (s.size() < 2) return false;
  const double gap = std::sqrt(tol.rel_eps) * s(0);
  for (Index v = 0; v + 1 < s.size(); ++v)
    if (s(v) - s(v + 1) <= gap) return true;
  return false;
}

struct RankOneSubproblem {
  struct Provenance {
    std::size_t pair = 0;   // i
    std::size_t block = 0;  // u
    std::size_t target = 0; // v
    std::size_t schmidt_index = 0;
  };
  std::vector<CVector> left_sources, left_targets;
  std::vector<CVector> right_sources, right_targets;
  std::vector<Provenance> provenance;

  std::size_t size() const { return provenance.size(); }

  void append(const RankOneSubproblem& o) {
    left_sources.insert(left_sources.end(), o.left_sources.begin(), o.left_sources.end());
    left_targets.insert(left_targets.end(), o.left_targets.begin(), o.left_targets.end());
    right_sources.insert(right_sources.end(), o.right_sources.begin(), o.right_sources.end());
    right_targets.insert(right_targets.end(), o.right_targets.begin(), o.right_targets.end());
    provenance.insert(provenance.end(), o.provenance.begin(), o.provenance.end());
  }
};

struct PairReduction {
  SchmidtForm x_form;
  SchmidtForm y_form;
  RankDivisibility ranks;
  std::optional<RatioWitness> peel;
  bool degenerate = false;
  RankOneSubproblem subproblem;
};

struct SchmidtReduction {
  Finding finding = Finding::pass;
  std::vector<PairReduction> pairs;
  RankOneSubproblem pooled;
  bool degenerate = false;
  std::vector<std::string> warnings;
  // set when finding == impossible
  std::optional<std::size_t> failed_pair;
  std::string condition;  // "rank_divisibility" or "peel"
};

inline SchmidtReduction schmidt_reduce(const TransformProblem& problem, const Tolerance& tol) {
  SchmidtReduction out;
  for (std::size_t i = 0; i < problem.k(); ++i) {
    const CMatrix X = problem.pairs[i].input.matrix();
    const CMatrix Y = problem.pairs[i].output.matrix();
    PairReduction pr;
    pr.x_form = schmidt_form(X, tol);
    pr.y_form = schmidt_form(Y, tol);
    pr.ranks = rank_divisibility(X, Y, tol);
    if (!pr.ranks.possible()) {
      out.finding = Finding::impossible;
      out.failed_pair = i;
      out.condition = "rank_divisibility";
      out.pairs.push_back(std::move(pr));
      return out;
    }
    const std::vector<double> alpha(pr.x_form.coefficients.data(),
                                    pr.x_form.coefficients.data() + pr.x_form.rank());
    const std::vector<double> beta(pr.y_form.coefficients.data(),
                                   pr.y_form.coefficients.data() + pr.y_form.rank());
    pr.peel = peel(alpha, beta, tol);
    if (!pr.peel->feasible) {
      out.finding = Finding::impossible;
      out.failed_pair = i;
      out.condition = "peel";
      out.pairs.push_back(std::move(pr));
      return out;
    }
    pr.degenerate = has_degenerate_spectrum(pr.x_form.coefficients, tol);
    if (pr.degenerate) {
      out.degenerate = true;
      out.warnings.push_back("DegeneracyWarning: pair " + std::to_string(i) +
                             " has repeated Schmidt coefficients; grouping is one valid choice");
    }
    std::vector<PeelMatch> matches = pr.peel->matches;
    std::sort(matches.begin(), matches.end(),
              [](const PeelMatch& a, const PeelMatch& b) { return a.alpha_index < b.alpha_index; });
    for (const PeelMatch& mt : matches) {
      const Index k = static_cast<Index>(mt.alpha_index);
      const Index v = static_cast<Index>(mt.beta_index);
      pr.subproblem.left_sources.push_back(pr.x_form.left.col(k));
      pr.subproblem.left_targets.push_back(pr.y_form.left.col(v));
      pr.subproblem.right_sources.push_back(pr.x_form.right.col(k));
      pr.subproblem.right_targets.push_back(pr.y_form.right.col(v));
      pr.subproblem.provenance.push_back({i, mt.block, mt.beta_index, mt.alpha_index});
    }
    out.pooled.append(pr.subproblem);
    out.pairs.push_back(std::move(pr));
  }
  return out;
}

struct ConditionEResult {
  Finding finding = Finding::pass;
  SinglePartyResult left;
  SinglePartyResult right;
  std::string failed_side;  // "left" or "right" when impossible (or downgraded)
  bool downgraded = false;  // impossible turned inconclusive by degeneracy
};

/// Runs the single-party test on the pooled left and right families. Only a
/// necessary condition: the best outcome is pass, never certified.
inline ConditionEResult necessary_condition_e(const SchmidtReduction& red, const Tolerance& tol,
                                              int max_iters = 10000) {
  if (red.finding == Finding::impossible) {
    throw PreconditionError("the pooled Gram test needs a successful Schmidt reduction");
  }
  ConditionEResult out;
  out.left = single_party_transformable(red.pooled.left_sources, red.pooled.left_targets, tol,
                                        max_iters);
  out.right = single_party_transformable(red.pooled.right_sources, red.pooled.right_targets, tol,
                                         max_iters);
  if (out.left.status == Status::impossible || out.right.status == Status::impossible) {
    out.failed_side = out.left.status == Status::impossible ? "left" : "right";
    out.finding = red.degenerate ? Finding::inconclusive : Finding::impossible;
    out.downgraded = red.degenerate;
  } else if (out.left.status == Status::inconclusive || out.right.status == Status::inconclusive) {
    out.finding = Finding::inconclusive;
  } else {
    out.finding = Finding::pass;
  }
  return out;
}

}  // namespace lotx

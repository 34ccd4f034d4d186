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

// Built-in reproduction catalog: named fixtures with their expected outcomes.

#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lotx/channel.hpp"
#include "lotx/errors.hpp"
#include "lotx/reduction.hpp"
#include "lotx/spectral.hpp"
#include "lotx/states.hpp"
#include "lotx/verdict.hpp"

namespace lotx {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TransformProblem load_problem_file(const std::string& path, const LoadOptions& opt = {}) {
  return load_problem(read_text_file(path), opt);
}

struct CatalogContext {
  std::string fixtures_dir;
  Tolerance tol;
  DecideOptions options;

  std::string path(const std::string& file) const { return fixtures_dir + "/" + file; }
  TransformProblem problem(const std::string& file) const {
    return load_problem_file(path(file), LoadOptions{false, tol});
  }
};

struct CatalogEntry {
  std::string group;
  std::string name;
  std::string description;
  std::string expected;
  std::function<std::string(const CatalogContext&)> run;
};

struct CatalogOutcome {
  std::string group;
  std::string name;
  std::string expected;
  std::string actual;
  bool match = false;
  double elapsed_ms = 0.0;
};

namespace detail {

inline std::string verdict_summary(const Verdict& v) {
  return std::string(to_string(v.status)) + " (stage " + std::to_string(v.stage) + ")";
}

inline std::string format_gammas(const RatioWitness& w) {
  if (!w.feasible) return "infeasible";
  std::string s = "gamma={";
  for (std::size_t u = 0; u < w.gammas.size(); ++u) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", u ? "," : "", w.gammas[u]);
    s += buf;
  }
  return s + "}";
}

// Diagonal m x m state with Schmidt coefficients proportional to v.
inline BipartiteState diagonal_state(const std::vector<double>& v, Index d) {
  CMatrix X = CMatrix::Zero(d, d);
  double norm = 0.0;
  for (double a : v) norm += a * a;
  for (std::size_t i = 0; i < v.size(); ++i) {
    X(static_cast<Index>(i), static_cast<Index>(i)) = v[i] / std::sqrt(norm);
  }
  return BipartiteState::from_matrix(X);
}

inline std::string gram_side(const CatalogContext& c, const std::string& file, bool left) {
  const TransformProblem prob = c.problem(file);
  const SchmidtReduction red = schmidt_reduce(prob, c.tol);
  if (red.finding == Finding::impossible) return "reduction failed";
  const auto& s = red.pooled;
  const SinglePartyResult r =
      left ? single_party_transformable(s.left_sources, s.left_targets, c.tol)
           : single_party_transformable(s.right_sources, s.right_targets, c.tol);
  return to_string(r.status);
}

inline std::string verify_fixture(const CatalogContext& c, const std::string& problem,
                                  const std::string& cert) {
  const UnitaryCertificate uc = load_certificate(read_text_file(c.path(cert)));
  return verify_certificate(uc, c.problem(problem), c.tol).pass ? "pass" : "fail";
}

}  // namespace detail

inline std::vector<CatalogEntry> builtin_catalog() {
  using detail::verdict_summary;
  std::vector<CatalogEntry> cat;
  auto decide_file = [](std::string file) {
    return [file](const CatalogContext& c) {
      return verdict_summary(decide(c.problem(file), c.options, c.tol));
    };
  };

  cat.push_back({"ex2p1", "certificate", "displayed U, V, R for the ancilla example verify", "pass",
                 [](const CatalogContext& c) {
                   return detail::verify_fixture(c, "ex2p1_example1.json",
                                                 "ex2p1_certificate.json");
                 }});
  cat.push_back({"ex2p1", "no-ancilla", "ancilla example with p = q = 1 is rigid", "Impossible (stage 4)",
                 decide_file("ex2p1_noancilla.json")});
  cat.push_back({"ex2p1", "example1", "ancilla example with p <= 1, q <= 2 is found by search",
                 "Certified (stage 5)", decide_file("ex2p1_example1.json")});

  struct PeelCase {
    std::vector<double> alpha, beta;
    std::string expected;
    std::string verdict;
  };
  const std::vector<PeelCase> peels{
      {{4, 2, 2, 1}, {2, 1}, "gamma={2,1}", "Certified (stage 1)"},
      {{4, 2, 2, 1}, {4, 2}, "gamma={1,0.5}", "Certified (stage 1)"},
      {{4, 2, 2, 1}, {2, 1, 1}, "infeasible", "Impossible (stage 1)"},
      {{4, 2, 2, 1}, {2, 0.5}, "infeasible", "Impossible (stage 1)"},
      {{4, 2, 2, 1}, {1, 1}, "infeasible", "Impossible (stage 1)"},
  };
  for (std::size_t t = 0; t < peels.size(); ++t) {
    const PeelCase pc = peels[t];
    std::string label;
    for (double b : pc.beta) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%g", label.empty() ? "" : ",", b);
      label += buf;
    }
    cat.push_back({"ex2p2", "peel{" + label + "}", "peeling {4,2,2,1} against {" + label + "}",
                   pc.expected, [pc](const CatalogContext& c) {
                     return detail::format_gammas(peel(pc.alpha, pc.beta, c.tol));
                   }});
    cat.push_back({"ex2p2", "pair{" + label + "}",
                   "single pair with these Schmidt profiles (normalised)", pc.verdict,
                   [pc](const CatalogContext& c) {
                     return verdict_summary(decide_single_pair(detail::diagonal_state(pc.alpha, 4),
                                                               detail::diagonal_state(pc.beta, 4),
                                                               c.tol));
                   }});
  }

  cat.push_back({"ex2p3", "gram-left", "left Gram data complete with M = G_X", "Certified",
                 [](const CatalogContext& c) {
                   return detail::gram_side(c, "ex2p3_final.json", true);
                 }});
  cat.push_back({"ex2p3", "gram-right", "right Gram data violate the zero pattern", "Impossible",
                 [](const CatalogContext& c) {
                   return detail::gram_side(c, "ex2p3_final.json", false);
                 }});
  cat.push_back({"ex2p3", "joint", "final two-pair example", "Impossible (stage 2)",
                 decide_file("ex2p3_final.json")});

  cat.push_back({"sec3", "single-party", "one channel on the joint system suffices", "Certified",
                 [](const CatalogContext& c) {
                   const TransformProblem p = c.problem("sec3_joint.json");
                   return std::string(
                       to_string(single_party_transformable(p.inputs(), p.outputs(), c.tol).status));
                 }});
  cat.push_back({"sec3", "pair1", "x1 -> y1 alone", "Certified (stage 1)",
                 decide_file("sec3_pair1.json")});
  cat.push_back({"sec3", "pair2", "x2 -> y2 alone", "Certified (stage 1)",
                 decide_file("sec3_pair2.json")});
  cat.push_back({"sec3", "certificate1", "displayed U1, V1, R1 verify", "pass",
                 [](const CatalogContext& c) {
                   return detail::verify_fixture(c, "sec3_pair1.json",
                                                 "sec3_pair1_certificate.json");
                 }});
  cat.push_back({"sec3", "certificate2", "displayed U2, V2, R2 verify", "pass",
                 [](const CatalogContext& c) {
                   return detail::verify_fixture(c, "sec3_pair2.json",
                                                 "sec3_pair2_certificate.json");
                 }});
  cat.push_back({"sec3", "joint", "both pairs with one local map", "Impossible (stage 2)",
                 decide_file("sec3_joint.json")});

  cat.push_back({"mixed", "reset", "mixed input reduced to its pure components",
                 "Certified (stage 5)", decide_file("mixed_reset.json")});
  return cat;
}

inline std::vector<CatalogOutcome> run_catalog(const CatalogContext& ctx) {
  std::vector<CatalogOutcome> out;
  for (const CatalogEntry& e : builtin_catalog()) {
    CatalogOutcome o{e.group, e.name, e.expected, "", false, 0.0};
    detail::Stopwatch sw;
    try {
      o.actual = e.run(ctx);
    } catch (const std::exception& ex) {
      o.actual = std::string("error: ") + ex.what();
    }
    o.elapsed_ms = sw.ms();
    o.match = o.actual == o.expected;
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace lotx

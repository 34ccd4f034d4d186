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

// lotx: command-line front end for the local-operations transformation verifier.
//
// Exit codes: 0 Certified / pass, 1 Impossible / fail, 2 Inconclusive,
// 3 input or usage error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lotx.hpp"

namespace {

#ifndef LOTX_FIXTURES_DIR
#define LOTX_FIXTURES_DIR "fixtures"
#endif

constexpr int kExitPass = 0;
constexpr int kExitImpossible = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInput = 3;

struct Options {
  std::string problem_path;
  std::string certificate_path;
  std::string format = "text";
  std::string fixtures_dir = LOTX_FIXTURES_DIR;
  double abs_eps = 1e-9;
  double rel_eps = 1e-9;
  double psd_eps = 1e-7;
  int max_p = 0;  // 0: take the bound from the problem file
  int max_q = 0;
  int p = 1;
  int q = 2;
  int pair_index = 0;
  std::uint64_t seed = 0;
  int restarts = 32;
  int max_sweeps = 500;
  int max_iters = 10000;
  bool normalize = false;
  bool list = false;
};

int exit_for(lotx::Status s) {
  switch (s) {
    case lotx::Status::certified:
      return kExitPass;
    case lotx::Status::impossible:
      return kExitImpossible;
    case lotx::Status::inconclusive:
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

lotx::Tolerance tolerance(const Options& o) { return {o.abs_eps, o.rel_eps, o.psd_eps}; }

lotx::TransformProblem load(const Options& o) {
  lotx::TransformProblem prob =
      lotx::load_problem_file(o.problem_path, lotx::LoadOptions{o.normalize, tolerance(o)});
  if (o.max_p > 0) prob.p_max = o.max_p;
  if (o.max_q > 0) prob.q_max = o.max_q;
  return prob;
}

lotx::DecideOptions decide_options(const Options& o) {
  lotx::DecideOptions d;
  d.search.seed = o.seed;
  d.search.restarts = o.restarts;
  d.search.max_sweeps = o.max_sweeps;
  d.max_iters = o.max_iters;
  return d;
}

void emit(const Options& o, const nlohmann::json& j, const std::string& text) {
  if (o.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

nlohmann::json complex_json(lotx::Complex z) { return {z.real(), z.imag()}; }

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_check(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  const lotx::Verdict v = lotx::decide(prob, decide_options(o), tolerance(o));
  emit(o, lotx::report_json(v), lotx::report_text(v));
  return exit_for(v.status);
}

int cmd_pair(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  if (o.pair_index < 0 || static_cast<std::size_t>(o.pair_index) >= prob.k()) {
    throw lotx::ParseError("--index out of range for this problem");
  }
  const auto& sp = prob.pairs[static_cast<std::size_t>(o.pair_index)];
  lotx::Verdict v = lotx::decide_single_pair(sp.input, sp.output, tolerance(o));
  v.normalization = prob.normalization;
  nlohmann::json j = lotx::report_json(v);
  std::string text = lotx::report_text(v);
  if (v.certificate) {
    const lotx::RVector rs = lotx::svd(v.certificate->R.front()).values;
    nlohmann::json sv = nlohmann::json::array();
    text += "R singular values:";
    for (lotx::Index i = 0; i < rs.size(); ++i) {
      sv.push_back(rs(i));
      text += " " + fmt(rs(i));
    }
    text += "\n";
    j["r_singular_values"] = sv;
  }
  emit(o, j, text);
  return exit_for(v.status);
}

nlohmann::json single_party_json(const lotx::SinglePartyResult& r) {
  nlohmann::json j{{"status", lotx::to_string(r.status)}};
  j["gram_x"] = lotx::matrix_to_json(r.GX);
  j["gram_y"] = lotx::matrix_to_json(r.GY);
  if (r.zero_pattern.witness) {
    j["zero_pattern_witness"] = {{"entry", {r.zero_pattern.witness->first, r.zero_pattern.witness->second}},
                                 {"gx", complex_json(r.zero_pattern.gx)},
                                 {"gy", complex_json(r.zero_pattern.gy)}};
  }
  if (r.completion) {
    const auto& c = *r.completion;
    j["completion"] = {{"status", lotx::to_string(c.status)},
                       {"min_eigenvalue", c.min_eigenvalue},
                       {"residual", c.residual},
                       {"iterations", c.iterations},
                       {"M", lotx::matrix_to_json(c.M)}};
    if (!c.certificate_indices.empty()) j["completion"]["certificate_indices"] = c.certificate_indices;
    if (!c.reason.empty()) j["completion"]["reason"] = c.reason;
  }
  return j;
}

std::string single_party_text(const std::string& label, const lotx::SinglePartyResult& r) {
  std::string t = label + ": " + lotx::to_string(r.status) + "\n";
  if (r.zero_pattern.witness) {
    t += "  zero-pattern witness at (" + std::to_string(r.zero_pattern.witness->first) + ", " +
         std::to_string(r.zero_pattern.witness->second) + "): |G_X| = " +
         fmt(std::abs(r.zero_pattern.gx)) + ", G_Y = 0\n";
  }
  if (r.completion) {
    const auto& c = *r.completion;
    t += std::string("  completion: ") + lotx::to_string(c.status) + ", min eigenvalue " +
         fmt(c.min_eigenvalue) + ", residual " + fmt(c.residual) + ", iterations " +
         std::to_string(c.iterations) + "\n";
    if (!c.certificate_indices.empty()) {
      t += "  forced principal submatrix on indices";
      for (auto i : c.certificate_indices) t += " " + std::to_string(i);
      t += "\n";
    }
  }
  return t;
}

int cmd_gram(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  const auto r = lotx::single_party_transformable(prob.inputs(), prob.outputs(), tolerance(o),
                                                  o.max_iters);
  emit(o, single_party_json(r), single_party_text("single-party test", r));
  return exit_for(r.status);
}

int cmd_svals(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  const lotx::Tolerance tol = tolerance(o);
  nlohmann::json arr = nlohmann::json::array();
  std::string text;
  bool all_ok = true;
  for (std::size_t i = 0; i < prob.k(); ++i) {
    const auto sx = lotx::nonzero_singular_values(prob.pairs[i].input.matrix(), tol);
    const auto sy = lotx::nonzero_singular_values(prob.pairs[i].output.matrix(), tol);
    const lotx::RatioWitness w = lotx::peel(sx, sy, tol);
    all_ok = all_ok && w.feasible;
    nlohmann::json pj{{"pair", i}, {"x", sx}, {"y", sy}, {"feasible", w.feasible},
                      {"gammas", w.gammas}};
    if (w.failure_step) pj["failure_step"] = *w.failure_step;
    arr.push_back(pj);
    text += "pair " + std::to_string(i) + "\n  X:";
    for (double s : sx) text += " " + fmt(s);
    text += "\n  Y:";
    for (double s : sy) text += " " + fmt(s);
    text += "\n  peel: ";
    if (w.feasible) {
      text += "feasible, gamma =";
      for (double g : w.gammas) text += " " + fmt(g);
    } else {
      text += "infeasible at step " + std::to_string(w.failure_step.value_or(0));
    }
    text += "\n";
  }
  emit(o, {{"pairs", arr}}, text);
  return all_ok ? kExitPass : kExitImpossible;
}

int cmd_reduce(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  const lotx::Tolerance tol = tolerance(o);
  const lotx::SchmidtReduction red = lotx::schmidt_reduce(prob, tol);
  nlohmann::json j{{"finding", lotx::to_string(red.finding)},
                   {"warnings", red.warnings},
                   {"subproblems", red.pooled.size()}};
  std::string text = std::string("Schmidt reduction: ") + lotx::to_string(red.finding) + "\n";
  for (const auto& w : red.warnings) text += "  warning: " + w + "\n";
  if (red.finding == lotx::Finding::impossible) {
    j["failed_pair"] = *red.failed_pair;
    j["condition"] = red.condition;
    text += "  pair " + std::to_string(*red.failed_pair) + " fails " + red.condition + "\n";
    emit(o, j, text);
    return kExitImpossible;
  }
  const lotx::ConditionEResult ce = lotx::necessary_condition_e(red, tol, o.max_iters);
  j["left"] = single_party_json(ce.left);
  j["right"] = single_party_json(ce.right);
  j["gram_condition"] = lotx::to_string(ce.finding);
  text += "  rank-one subproblems: " + std::to_string(red.pooled.size()) + "\n";
  text += single_party_text("left", ce.left) + single_party_text("right", ce.right);
  text += std::string("condition: ") + lotx::to_string(ce.finding) + "\n";
  emit(o, j, text);
  switch (ce.finding) {
    case lotx::Finding::pass:
      return kExitPass;
    case lotx::Finding::impossible:
      return kExitImpossible;
    default:
      return kExitInconclusive;
  }
}

int cmd_verify(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  const lotx::UnitaryCertificate cert =
      lotx::load_certificate(lotx::read_text_file(o.certificate_path));
  const lotx::CertificateCheck chk = lotx::verify_certificate(cert, prob, tolerance(o));
  nlohmann::json j{{"pass", chk.pass},
                   {"unitarity_u", chk.unitarity_u},
                   {"unitarity_v", chk.unitarity_v},
                   {"reason", chk.reason},
                   {"pairs", nlohmann::json::array()}};
  std::string text = std::string("certificate ") + (chk.pass ? "verified" : "rejected") + "\n";
  if (!chk.reason.empty()) text += "  " + chk.reason + "\n";
  text += "  unitarity residuals: U " + fmt(chk.unitarity_u) + ", V " + fmt(chk.unitarity_v) + "\n";
  for (std::size_t i = 0; i < chk.pairs.size(); ++i) {
    const auto& pc = chk.pairs[i];
    j["pairs"].push_back({{"residual", pc.residual_c},
                          {"residual_vectorised", pc.residual_b},
                          {"trace_rr", pc.trace_r},
                          {"pass", pc.pass}});
    text += "  pair " + std::to_string(i) + ": residual " + fmt(pc.residual_c) + ", tr RR* " +
            fmt(pc.trace_r) + "\n";
  }
  emit(o, j, text);
  return chk.pass ? kExitPass : kExitImpossible;
}

int cmd_search(const Options& o) {
  const lotx::TransformProblem prob = load(o);
  lotx::SearchConfig cfg;
  cfg.seed = o.seed;
  cfg.restarts = o.restarts;
  cfg.max_sweeps = o.max_sweeps;
  cfg.p = o.p;
  cfg.q = o.q;
  const lotx::SearchResult r = lotx::search_certificate(prob, cfg, tolerance(o));
  nlohmann::json j{{"certified", r.certified},
                   {"p", cfg.p},
                   {"q", cfg.q},
                   {"seed", cfg.seed},
                   {"best_objective", r.best_objective},
                   {"best_restart", r.best_restart},
                   {"sweeps", r.sweeps}};
  if (r.certificate) j["certificate"] = lotx::certificate_to_json(*r.certificate);
  std::string text = std::string("search p=") + std::to_string(cfg.p) + " q=" +
                     std::to_string(cfg.q) + ": " +
                     (r.certified ? "certificate found and verified" : "no certificate found") +
                     "\n  best objective " + fmt(r.best_objective) + " (restart " +
                     std::to_string(r.best_restart) + "), sweeps " + std::to_string(r.sweeps) +
                     "\n";
  emit(o, j, text);
  return r.certified ? kExitPass : kExitInconclusive;
}

int cmd_examples(const Options& o) {
  const auto catalog = lotx::builtin_catalog();
  if (o.list) {
    nlohmann::json arr = nlohmann::json::array();
    std::string text;
    for (const auto& e : catalog) {
      arr.push_back({{"group", e.group},
                     {"name", e.name},
                     {"description", e.description},
                     {"expected", e.expected}});
      text += e.group + "/" + e.name + ": " + e.expected + "  (" + e.description + ")\n";
    }
    emit(o, {{"examples", arr}}, text);
    return kExitPass;
  }
  lotx::CatalogContext ctx{o.fixtures_dir, tolerance(o), decide_options(o)};
  const auto results = lotx::run_catalog(ctx);
  nlohmann::json arr = nlohmann::json::array();
  std::string text;
  int mismatches = 0;
  for (const auto& r : results) {
    mismatches += r.match ? 0 : 1;
    arr.push_back({{"group", r.group},
                   {"name", r.name},
                   {"expected", r.expected},
                   {"actual", r.actual},
                   {"match", r.match},
                   {"elapsed_ms", r.elapsed_ms}});
    text += std::string(r.match ? "match    " : "MISMATCH ") + r.group + "/" + r.name +
            ": expected " + r.expected + ", got " + r.actual + "\n";
  }
  text += std::to_string(results.size() - static_cast<std::size_t>(mismatches)) + "/" +
          std::to_string(results.size()) + " examples match\n";
  emit(o, {{"examples", arr}, {"mismatches", mismatches}}, text);
  return mismatches == 0 ? kExitPass : kExitImpossible;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Decide whether local operations carry bipartite pure states x_i to y_i"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "lotx 0.1.0");

  auto add_common = [&](CLI::App* sub, bool needs_problem) {
    if (needs_problem) {
      sub->add_option("problem", o.problem_path, "problem JSON file")->required();
    }
    sub->add_option("--tolerance", o.abs_eps, "absolute tolerance abs_eps")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--rel-tolerance", o.rel_eps, "relative tolerance rel_eps")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--psd-tolerance", o.psd_eps, "PSD tolerance psd_eps")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("--normalize", o.normalize, "rescale non-unit states instead of rejecting them");
    sub->add_option("--max-iters", o.max_iters, "iteration limit for Gram completion")
        ->check(CLI::PositiveNumber);
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "search seed");
    sub->add_option("--restarts", o.restarts, "random restarts per ancilla size")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", o.max_sweeps, "sweeps per restart")
        ->check(CLI::PositiveNumber);
  };
  auto add_bounds = [&](CLI::App* sub) {
    sub->add_option("--max-p", o.max_p, "override p_max")->check(CLI::PositiveNumber);
    sub->add_option("--max-q", o.max_q, "override q_max")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "run the full decision pipeline");
  add_common(check, true);
  add_search(check);
  add_bounds(check);

  auto* pair = app.add_subcommand("pair", "decide a single pair (complete)");
  add_common(pair, true);
  pair->add_option("--index", o.pair_index, "which pair of the file (0-based)");

  auto* gram = app.add_subcommand("gram", "single-party test on the full states");
  add_common(gram, true);

  auto* svals = app.add_subcommand("svals", "singular values and peeling per pair");
  add_common(svals, true);

  auto* reduce = app.add_subcommand("reduce", "Schmidt reduction and pooled Gram tests");
  add_common(reduce, true);

  auto* verify = app.add_subcommand("verify", "verify a unitary certificate");
  add_common(verify, true);
  verify->add_option("--certificate", o.certificate_path, "certificate JSON file")->required();

  auto* search = app.add_subcommand("search", "search for a certificate at fixed p, q");
  add_common(search, true);
  add_search(search);
  search->add_option("--p", o.p, "Alice's ancilla dimension")->check(CLI::PositiveNumber);
  search->add_option("--q", o.q, "Bob's ancilla dimension")->check(CLI::PositiveNumber);
  add_bounds(search);

  auto* examples = app.add_subcommand("examples", "run the built-in reproduction catalog");
  add_common(examples, false);
  add_search(examples);
  examples->add_flag("--list", o.list, "list the catalog without running it");
  examples->add_option("--fixtures", o.fixtures_dir, "fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*check) return cmd_check(o);
    if (*pair) return cmd_pair(o);
    if (*gram) return cmd_gram(o);
    if (*svals) return cmd_svals(o);
    if (*reduce) return cmd_reduce(o);
    if (*verify) return cmd_verify(o);
    if (*search) return cmd_search(o);
    if (*examples) return cmd_examples(o);
  } catch (const lotx::Error& e) {
    std::cerr << "lotx: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "lotx: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

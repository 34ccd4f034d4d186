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

// Problem model: bipartite pure states, transformation problems, mixed-state
// inputs, and the JSON problem-file format.
//
// Problem file (UTF-8 JSON, unknown keys rejected):
//
//   {
//     "m": 4, "n": 4,                      // local dimensions
//     "p_max": 2, "q_max": 2,              // optional ancilla bounds (default 2)
//     "pairs": [ { "x": [[re, im], ...], "y": [[re, im], ...],
//                  "weight": 0.5,          // optional metadata
//                  "source": 0 } ],        // optional mixed-input index
//     "mixed": {                           // optional
//       "inputs":  [ [ [[re, im], ...], ... ], ... ],   // components x_ij
//       "outputs": [ [[re, im], ...], ... ]             // targets y_i
//     }
//   }
//
// re and im are JSON numbers or amplitude expressions ("1.6/sqrt5").

#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lotx/errors.hpp"
#include "lotx/expr.hpp"
#include "lotx/linalg.hpp"

namespace lotx {

/// Pure state on C^m ⊗ C^n. amplitudes(i * n + j) is the coefficient of |i>|j>.
struct BipartiteState {
  Index m = 0;
  Index n = 0;
  CVector amplitudes;

  BipartiteState() = default;
  BipartiteState(Index m_, Index n_, CVector amps) : m(m_), n(n_), amplitudes(std::move(amps)) {
    if (m <= 0 || n <= 0 || amplitudes.size() != m * n) {
      throw DimensionError("state needs m*n = " + std::to_string(m * n) + " amplitudes, got " +
                           std::to_string(amplitudes.size()));
    }
  }

  static BipartiteState from_matrix(const CMatrix& X) {
    return BipartiteState(X.rows(), X.cols(), matrix_to_vec(X));
  }

  CMatrix matrix() const { return vec_to_matrix(amplitudes, m, n); }
  double norm() const { return amplitudes.norm(); }
  bool is_unit(const Tolerance& tol) const { return std::abs(norm() - 1.0) <= tol.rel_eps; }
};

/// One required mapping x -> y. weight and source are reporting metadata
/// carried over from a mixed-state reduction.
struct StatePair {
  BipartiteState input;
  BipartiteState output;
  double weight = 1.0;
  std::optional<int> source;
};

/// Rescaling applied by --normalize, kept for the report.
struct NormalizationRecord {
  std::string where;  // e.g. "pairs[1].y"
  double original_norm = 1.0;
};

struct TransformProblem {
  Index m = 0;
  Index n = 0;
  std::vector<StatePair> pairs;
  int p_max = 2;
  int q_max = 2;
  std::vector<NormalizationRecord> normalization;

  std::size_t k() const { return pairs.size(); }

  std::vector<BipartiteState> inputs() const {
    std::vector<BipartiteState> out;
    for (const auto& p : pairs) out.push_back(p.input);
    return out;
  }
  std::vector<BipartiteState> outputs() const {
    std::vector<BipartiteState> out;
    for (const auto& p : pairs) out.push_back(p.output);
    return out;
  }

  void validate(const Tolerance& tol) const {
    if (m <= 0 || n <= 0) throw DimensionError("m and n must be positive");
    if (pairs.empty()) throw ParseError("problem needs at least one pair");
    if (p_max < 1 || q_max < 1) throw ParseError("p_max and q_max must be >= 1");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (const BipartiteState* s : {&pairs[i].input, &pairs[i].output}) {
        if (s->m != m || s->n != n || s->amplitudes.size() != m * n) {
          throw DimensionError("pair " + std::to_string(i) + " does not match m=" +
                               std::to_string(m) + ", n=" + std::to_string(n));
        }
        require_finite(s->amplitudes, "pair " + std::to_string(i));
        if (!s->is_unit(tol)) {
          throw NormalizationError("pair " + std::to_string(i) + " has a state of norm " +
                                   std::to_string(s->norm()) + " (use --normalize)");
        }
      }
    }
  }
};

struct MixedInput {
  std::vector<CVector> components;  // unnormalised x_ij, A_i = sum_j x_ij x_ij^*

  CMatrix density() const {
    const Index d = components.empty() ? 0 : components.front().size();
    CMatrix a = CMatrix::Zero(d, d);
    for (const auto& x : components) a += x * x.adjoint();
    return a;
  }
  double trace() const {
    double t = 0.0;
    for (const auto& x : components) t += x.squaredNorm();
    return t;
  }
};

struct MixedInputProblem {
  Index m = 0;
  Index n = 0;
  std::vector<MixedInput> inputs;
  std::vector<BipartiteState> outputs;
  int p_max = 2;
  int q_max = 2;
};

struct LoadOptions {
  bool normalize = false;
  Tolerance tol;
};

// ---------------------------------------------------------------------------

/// tr_B |x><x| = X X^*.
inline CMatrix partial_trace_B(const BipartiteState& x) { return reduced_density_a(x.matrix()); }

/// Gram matrix (<v_i|v_j>). Diagonal entries within rel_eps of 1 are set
/// to exactly 1.
inline CMatrix gram_matrix(const std::vector<CVector>& vs, const Tolerance& tol = {}) {
  const Index k = static_cast<Index>(vs.size());
  CMatrix g(k, k);
  for (Index i = 0; i < k; ++i) {
    if (vs[static_cast<std::size_t>(i)].size() != vs.front().size()) {
      throw DimensionError("gram matrix needs vectors of one dimension");
    }
    for (Index j = i; j < k; ++j) {
      const Complex ip = vs[static_cast<std::size_t>(i)].dot(vs[static_cast<std::size_t>(j)]);
      g(i, j) = ip;
      g(j, i) = std::conj(ip);
    }
    const double d = g(i, i).real();
    g(i, i) = std::abs(d - 1.0) <= tol.rel_eps ? 1.0 : d;
  }
  return g;
}

inline CMatrix gram_matrix(const std::vector<BipartiteState>& states, const Tolerance& tol = {}) {
  std::vector<CVector> vs;
  for (const auto& s : states) {
    if (s.m != states.front().m || s.n != states.front().n) {
      throw DimensionError("gram matrix needs states of one dimension");
    }
    vs.push_back(s.amplitudes);
  }
  return gram_matrix(vs, tol);
}

/// Splits every mixed input A_i = sum_j x_ij x_ij^* into the pure pairs
/// (x_ij / |x_ij|, y_i) with weight |x_ij|^2. The tensor-form map sending
/// A_i to y_i y_i^* exists iff one sends each x_ij x_ij^* to
/// (x_ij^* x_ij) y_i y_i^*, i.e. each normalised x_ij to y_i.
inline TransformProblem mixed_reduction(const MixedInputProblem& mp, const Tolerance& tol = {}) {
  if (mp.inputs.size() != mp.outputs.size()) {
    throw DimensionError("mixed problem needs one output per mixed input");
  }
  TransformProblem out;
  out.m = mp.m;
  out.n = mp.n;
  out.p_max = mp.p_max;
  out.q_max = mp.q_max;
  for (std::size_t i = 0; i < mp.inputs.size(); ++i) {
    const MixedInput& a = mp.inputs[i];
    if (a.components.empty()) throw ParseError("mixed input " + std::to_string(i) + " is empty");
    if (std::abs(a.trace() - 1.0) > tol.rel_eps) {
      throw NormalizationError("mixed input " + std::to_string(i) + " has trace " +
                               std::to_string(a.trace()));
    }
    for (std::size_t j = 0; j < a.components.size(); ++j) {
      const CVector& x = a.components[j];
      if (x.size() != mp.m * mp.n) {
        throw DimensionError("mixed component " + std::to_string(i) + "." + std::to_string(j) +
                             " has wrong length");
      }
      const double nx = x.norm();
      if (!(nx > 0.0)) {
        throw ZeroComponentError("mixed component " + std::to_string(i) + "." +
                                 std::to_string(j) + " has zero norm");
      }
      StatePair pair{BipartiteState(mp.m, mp.n, x / nx), mp.outputs[i], nx * nx,
                     static_cast<int>(i)};
      out.pairs.push_back(std::move(pair));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {

inline double json_scalar(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return eval_amplitude_expr(v.get<std::string>());
  throw ParseError(where + ": expected a number or an amplitude expression");
}

inline CVector json_amplitudes(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array of [re, im] pairs");
  CVector x(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& e = v[i];
    if (!e.is_array() || e.size() != 2) {
      throw ParseError(where + "[" + std::to_string(i) + "]: expected [re, im]");
    }
    x(static_cast<Index>(i)) = Complex(json_scalar(e[0], where), json_scalar(e[1], where));
  }
  return x;
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError(where + ": unknown key \"" + it.key() + "\"");
  }
}

inline int json_positive_int(const nlohmann::json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string("\"") + key + "\" must be a positive integer");
  }
  return v.get<int>();
}

inline nlohmann::json amplitudes_to_json(const CVector& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < x.size(); ++i) arr.push_back({x(i).real(), x(i).imag()});
  return arr;
}

inline BipartiteState make_state(CVector x, Index m, Index n, const LoadOptions& opt,
                                 const std::string& where,
                                 std::vector<NormalizationRecord>& records) {
  if (x.size() != m * n) {
    throw DimensionError(where + ": expected " + std::to_string(m * n) + " amplitudes, got " +
                         std::to_string(x.size()));
  }
  const double nx = x.norm();
  if (std::abs(nx - 1.0) > opt.tol.rel_eps) {
    if (!opt.normalize) {
      throw NormalizationError(where + " has norm " + std::to_string(nx) +
                               " (pass --normalize to rescale)");
    }
    if (!(nx > 0.0)) throw NormalizationError(where + " is the zero vector");
    x /= nx;
    records.push_back({where, nx});
  }
  return BipartiteState(m, n, std::move(x));
}

}  // namespace detail

inline MixedInputProblem parse_mixed_section(const nlohmann::json& mixed, Index m, Index n,
                                             const LoadOptions& opt) {
  detail::reject_unknown(mixed, {"inputs", "outputs"}, "mixed");
  if (!mixed.contains("inputs") || !mixed.contains("outputs")) {
    throw ParseError("mixed: needs \"inputs\" and \"outputs\"");
  }
  const auto& ins = mixed.at("inputs");
  const auto& outs = mixed.at("outputs");
  if (!ins.is_array() || !outs.is_array() || ins.size() != outs.size() || ins.empty()) {
    throw ParseError("mixed: inputs and outputs must be non-empty arrays of equal length");
  }
  MixedInputProblem mp;
  mp.m = m;
  mp.n = n;
  std::vector<NormalizationRecord> unused;
  for (std::size_t i = 0; i < ins.size(); ++i) {
    const std::string where = "mixed.inputs[" + std::to_string(i) + "]";
    if (!ins[i].is_array() || ins[i].empty()) throw ParseError(where + ": expected components");
    MixedInput a;
    for (std::size_t j = 0; j < ins[i].size(); ++j) {
      CVector x = detail::json_amplitudes(ins[i][j], where);
      if (x.size() != m * n) throw DimensionError(where + ": component has wrong length");
      a.components.push_back(std::move(x));
    }
    const double tr = a.trace();
    if (std::abs(tr - 1.0) > opt.tol.rel_eps) {
      if (!opt.normalize || !(tr > 0.0)) {
        throw NormalizationError(where + " has trace " + std::to_string(tr) +
                                 " (pass --normalize to rescale)");
      }
      for (auto& x : a.components) x /= std::sqrt(tr);
    }
    mp.inputs.push_back(std::move(a));
    mp.outputs.push_back(detail::make_state(
        detail::json_amplitudes(outs[i], "mixed.outputs[" + std::to_string(i) + "]"), m, n, opt,
        "mixed.outputs[" + std::to_string(i) + "]", unused));
  }
  return mp;
}

/// Parses and validates a problem file. A "mixed" section is reduced with
/// mixed_reduction and appended after the explicit pure pairs.
inline TransformProblem load_problem(std::string_view text, const LoadOptions& opt = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("problem file is not valid JSON: ") + e.what());
  }
  detail::reject_unknown(doc, {"m", "n", "p_max", "q_max", "pairs", "mixed"}, "problem");
  for (const char* key : {"m", "n"}) {
    if (!doc.contains(key)) throw ParseError(std::string("problem: missing \"") + key + "\"");
  }
  TransformProblem prob;
  prob.m = detail::json_positive_int(doc, "m", 0);
  prob.n = detail::json_positive_int(doc, "n", 0);
  prob.p_max = detail::json_positive_int(doc, "p_max", 2);
  prob.q_max = detail::json_positive_int(doc, "q_max", 2);

  if (doc.contains("pairs")) {
    const auto& pairs = doc.at("pairs");
    if (!pairs.is_array()) throw ParseError("problem: \"pairs\" must be an array");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string where = "pairs[" + std::to_string(i) + "]";
      const auto& pj = pairs[i];
      detail::reject_unknown(pj, {"x", "y", "weight", "source"}, where);
      if (!pj.contains("x") || !pj.contains("y")) throw ParseError(where + ": needs x and y");
      StatePair sp{
          detail::make_state(detail::json_amplitudes(pj.at("x"), where + ".x"), prob.m, prob.n,
                             opt, where + ".x", prob.normalization),
          detail::make_state(detail::json_amplitudes(pj.at("y"), where + ".y"), prob.m, prob.n,
                             opt, where + ".y", prob.normalization),
          1.0, std::nullopt};
      if (pj.contains("weight")) {
        if (!pj.at("weight").is_number()) throw ParseError(where + ": weight must be a number");
        sp.weight = pj.at("weight").get<double>();
      }
      if (pj.contains("source")) {
        if (!pj.at("source").is_number_integer()) {
          throw ParseError(where + ": source must be an integer");
        }
        sp.source = pj.at("source").get<int>();
      }
      prob.pairs.push_back(std::move(sp));
    }
  }
  if (doc.contains("mixed")) {
    MixedInputProblem mp = parse_mixed_section(doc.at("mixed"), prob.m, prob.n, opt);
    mp.p_max = prob.p_max;
    mp.q_max = prob.q_max;
    TransformProblem reduced = mixed_reduction(mp, opt.tol);
    for (auto& p : reduced.pairs) prob.pairs.push_back(std::move(p));
  }
  if (prob.pairs.empty()) throw ParseError("problem: pair list is empty");
  prob.validate(opt.tol);
  return prob;
}

inline nlohmann::json problem_to_json(const TransformProblem& prob) {
  nlohmann::json doc;
  doc["m"] = prob.m;
  doc["n"] = prob.n;
  doc["p_max"] = prob.p_max;
  doc["q_max"] = prob.q_max;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : prob.pairs) {
    nlohmann::json pj;
    pj["x"] = detail::amplitudes_to_json(p.input.amplitudes);
    pj["y"] = detail::amplitudes_to_json(p.output.amplitudes);
    if (p.weight != 1.0) pj["weight"] = p.weight;
    if (p.source) pj["source"] = *p.source;
    pairs.push_back(std::move(pj));
  }
  doc["pairs"] = std::move(pairs);
  return doc;
}

inline std::string serialize_problem(const TransformProblem& prob) {
  return problem_to_json(prob).dump(2);
}

}  // namespace lotx

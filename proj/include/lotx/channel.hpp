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

// Local channels, unitary dilations and certificate verification.
//
// A TPCP map on Alice's side with p Kraus operators F_1..F_p (m x m) and one
// on Bob's side with q operators G_1..G_q (n x n) act on a state matrix X as
// X -> F_i X G_j^T. Stacking the F_i as the first block column of an
// mp x mp unitary U and the G_j^T as the first block row of an nq x nq
// unitary V gives U (E11 ⊗ X) V, whose (i, j) block is F_i X G_j^T.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lotx/errors.hpp"
#include "lotx/linalg.hpp"
#include "lotx/states.hpp"

namespace lotx {

struct KrausChannelPair {
  std::vector<CMatrix> F;  // Alice, m x m each
  std::vector<CMatrix> G;  // Bob, n x n each

  /// max of ||sum F^*F - I|| and ||sum G^*G - I|| (Frobenius).
  double trace_preservation_residual() const {
    auto resid = [](const std::vector<CMatrix>& ks) {
      if (ks.empty()) return std::numeric_limits<double>::infinity();
      CMatrix s = CMatrix::Zero(ks.front().cols(), ks.front().cols());
      for (const CMatrix& k : ks) s += k.adjoint() * k;
      return (s - CMatrix::Identity(s.rows(), s.cols())).norm();
    };
    return std::max(resid(F), resid(G));
  }
};

/// rho -> sum_{i,j} (F_i ⊗ G_j) rho (F_i ⊗ G_j)^* on C^m ⊗ C^n.
inline CMatrix apply_channel(const KrausChannelPair& ch, const CMatrix& rho,
                             const Tolerance& tol = {}) {
  if (ch.F.empty() || ch.G.empty()) throw ChannelInvalidError("channel needs Kraus operators");
  const Index m = ch.F.front().rows();
  const Index n = ch.G.front().rows();
  if (rho.rows() != m * n || rho.cols() != m * n) {
    throw DimensionError("density matrix does not match the channel dimensions");
  }
  if (ch.trace_preservation_residual() > 10.0 * tol.abs_eps) {
    throw ChannelInvalidError("Kraus operators are not trace preserving");
  }
  CMatrix out = CMatrix::Zero(m * n, m * n);
  for (const CMatrix& f : ch.F)
    for (const CMatrix& g : ch.G) {
      const CMatrix k = kron(f, g);
      out += k * rho * k.adjoint();
    }
  return out;
}

/// <y| rho |y> for a unit vector y.
inline double fidelity(const CVector& y, const CMatrix& rho) {
  return (y.adjoint() * rho * y)(0, 0).real();
}

/// U (mp x mp), V (nq x nq) and one p x q matrix R_i per pair.
struct UnitaryCertificate {
  int p = 1;
  int q = 1;
  CMatrix U;
  CMatrix V;
  std::vector<CMatrix> R;
};

inline KrausChannelPair kraus_from_unitary(const UnitaryCertificate& c, Index m, Index n) {
  if (c.U.rows() != m * c.p || c.V.rows() != n * c.q) {
    throw DimensionError("certificate unitaries do not match m, n, p, q");
  }
  KrausChannelPair ch;
  for (int i = 0; i < c.p; ++i) ch.F.push_back(c.U.block(i * m, 0, m, m));
  for (int j = 0; j < c.q; ++j) ch.G.push_back(c.V.block(0, j * n, n, n).transpose());
  return ch;
}

struct PairCheck {
  double residual_c = 0.0;  // ||U (E11 ⊗ X) V - R ⊗ Y||
  double residual_b = 0.0;  // same identity in vectorised form
  double trace_r = 0.0;     // tr R R^*
  bool pass = false;
};

struct CertificateCheck {
  bool pass = false;
  double unitarity_u = 0.0;
  double unitarity_v = 0.0;
  std::vector<PairCheck> pairs;
  std::string reason;
};

/// Checks every pair in matrix form and in vectorised form
/// (U ⊗ V^T) vec(E11 ⊗ X) = vec(R ⊗ Y), plus unitarity and tr R R^* = 1.
inline CertificateCheck verify_certificate(const UnitaryCertificate& c,
                                           const TransformProblem& prob, const Tolerance& tol) {
  CertificateCheck out;
  const Index m = prob.m, n = prob.n;
  if (c.p < 1 || c.q < 1 || c.U.rows() != m * c.p || c.U.cols() != m * c.p ||
      c.V.rows() != n * c.q || c.V.cols() != n * c.q) {
    throw DimensionError("certificate unitaries do not match m, n, p, q");
  }
  if (c.R.size() != prob.k()) throw DimensionError("certificate needs one R per pair");
  const double thresh = 10.0 * tol.abs_eps;
  out.unitarity_u = unitarity_residual(c.U);
  out.unitarity_v = unitarity_residual(c.V);
  bool ok = out.unitarity_u <= thresh && out.unitarity_v <= thresh;
  if (!ok) out.reason = "U or V is not unitary";

  const CMatrix E = e11(c.p, c.q);
  const CMatrix UV = kron(c.U, CMatrix(c.V.transpose()));
  for (std::size_t i = 0; i < prob.k(); ++i) {
    const CMatrix& R = c.R[i];
    if (R.rows() != c.p || R.cols() != c.q) throw DimensionError("R has the wrong shape");
    const CMatrix A = kron(E, prob.pairs[i].input.matrix());
    const CMatrix B = kron(R, prob.pairs[i].output.matrix());
    PairCheck pc;
    pc.residual_c = (c.U * A * c.V - B).norm();
    pc.residual_b = (UV * matrix_to_vec(A) - matrix_to_vec(B)).norm();
    pc.trace_r = R.squaredNorm();
    pc.pass = pc.residual_c <= thresh && pc.residual_b <= thresh &&
              std::abs(pc.trace_r - 1.0) <= std::max(tol.rel_eps, thresh);
    if (!pc.pass && out.reason.empty()) {
      out.reason = "pair " + std::to_string(i) + " is not carried to its target";
    }
    ok = ok && pc.pass;
    out.pairs.push_back(pc);
  }
  out.pass = ok;
  return out;
}

// ---------------------------------------------------------------------------
// JSON form: {"p", "q", "U", "V", "R"}; matrices are arrays of rows of
// [re, im] entries, each a number or an amplitude expression.
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const CMatrix& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  CMatrix a(static_cast<Index>(v.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) throw ParseError(where + ": ragged matrix");
    const CVector row = detail::json_amplitudes(v[i], where);
    a.row(static_cast<Index>(i)) = row.transpose();
  }
  return a;
}

inline nlohmann::json certificate_to_json(const UnitaryCertificate& c) {
  nlohmann::json j;
  j["p"] = c.p;
  j["q"] = c.q;
  j["U"] = matrix_to_json(c.U);
  j["V"] = matrix_to_json(c.V);
  j["R"] = nlohmann::json::array();
  for (const CMatrix& r : c.R) j["R"].push_back(matrix_to_json(r));
  return j;
}

inline UnitaryCertificate certificate_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j, {"p", "q", "U", "V", "R"}, "certificate");
  for (const char* key : {"U", "V", "R"})
    if (!j.contains(key)) throw ParseError(std::string("certificate: missing \"") + key + "\"");
  UnitaryCertificate c;
  c.p = detail::json_positive_int(j, "p", 1);
  c.q = detail::json_positive_int(j, "q", 1);
  c.U = matrix_from_json(j.at("U"), "certificate.U");
  c.V = matrix_from_json(j.at("V"), "certificate.V");
  if (!j.at("R").is_array()) throw ParseError("certificate.R: expected an array of matrices");
  for (std::size_t i = 0; i < j.at("R").size(); ++i) {
    c.R.push_back(matrix_from_json(j.at("R")[i], "certificate.R[" + std::to_string(i) + "]"));
  }
  return c;
}

inline UnitaryCertificate load_certificate(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

}  // namespace lotx

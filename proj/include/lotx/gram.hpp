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

// Single-party pure-state transformability: a map sending x_i x_i^* to
// y_i y_i^* exists iff some correlation matrix M (PSD, unit diagonal)
// satisfies G_X = M ∘ G_Y. Entries where G_Y vanishes leave M free, which
// turns the test into a PSD completion problem; Dykstra's alternating
// projections search for a completion, and a non-PSD fully specified
// principal submatrix certifies that none exists.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lotx/errors.hpp"
#include "lotx/finding.hpp"
#include "lotx/linalg.hpp"
#include "lotx/states.hpp"

namespace lotx {

struct ZeroPatternResult {
  Finding finding = Finding::pass;
  std::optional<std::pair<Index, Index>> witness;  // zero based
  Complex gx{};
  Complex gy{};
};

/// G_X must vanish wherever G_Y does.
inline ZeroPatternResult zero_pattern_check(const CMatrix& GX, const CMatrix& GY,
                                            const Tolerance& tol) {
  if (GX.rows() != GX.cols() || GX.rows() != GY.rows() || GY.rows() != GY.cols()) {
    throw DimensionError("gram matrices must be square of equal size");
  }
  ZeroPatternResult out;
  for (Index i = 0; i < GX.rows(); ++i) {
    for (Index j = i + 1; j < GX.cols(); ++j) {
      if (std::abs(GY(i, j)) <= tol.abs_eps && std::abs(GX(i, j)) > tol.abs_eps) {
        out.finding = Finding::impossible;
        out.witness = std::make_pair(i, j);
        out.gx = GX(i, j);
        out.gy = GY(i, j);
        return out;
      }
    }
  }
  return out;
}

enum class CompletionStatus { feasible, infeasible, inconclusive };

inline const char* to_string(CompletionStatus s) {
  switch (s) {
    case CompletionStatus::feasible:
      return "feasible";
    case CompletionStatus::infeasible:
      return "infeasible";
    case CompletionStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct CorrelationCompletion {
  CompletionStatus status = CompletionStatus::inconclusive;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> forced;
  CMatrix forced_values;                          // G_X / G_Y on forced entries
  std::vector<std::pair<Index, Index>> free_pattern;  // i < j
  CMatrix M;                                      // last affine iterate
  double min_eigenvalue = 0.0;
  double residual = 0.0;  // max |G_X - M ∘ G_Y|
  double gap = 0.0;       // |affine iterate - PSD iterate|_F at exit
  int iterations = 0;
  std::vector<Index> certificate_indices;  // forced principal submatrix, when infeasible
  CMatrix certificate;
  // Separating matrix W, when infeasible without a submatrix witness: W is
  // PSD, vanishes on free entries, and Re<W, F> < -psd_eps tr W for the
  // forced data F, so Re<W, M> < -psd_eps tr W for every completion M.
  CMatrix dual_certificate;
  std::string reason;
};

namespace detail {

/// Projection onto {M : M >= floor * I}; floor = 0 is the PSD cone.
inline CMatrix project_psd(const CMatrix& a, double floor = 0.0) {
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in PSD projection");
  const RVector lam = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

// Bron-Kerbosch with pivoting over the graph of forced off-diagonal entries.
class CliqueEnumerator {
 public:
  CliqueEnumerator(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adj,
                   std::size_t limit)
      : adj_(adj), limit_(limit) {}

  std::vector<std::vector<Index>> run() {
    std::vector<Index> r, p, x;
    for (Index i = 0; i < adj_.rows(); ++i) p.push_back(i);
    expand(r, p, x);
    return std::move(out_);
  }

 private:
  void expand(std::vector<Index>& r, std::vector<Index> p, std::vector<Index> x) {
    if (out_.size() >= limit_) return;
    if (p.empty() && x.empty()) {
      out_.push_back(r);
      return;
    }
    Index pivot = !p.empty() ? p.front() : x.front();
    std::size_t best = 0;
    for (const auto* set : {&p, &x}) {
      for (Index u : *set) {
        std::size_t deg = 0;
        for (Index v : p) deg += adj_(u, v) ? 1u : 0u;
        if (deg > best) {
          best = deg;
          pivot = u;
        }
      }
    }
    const std::vector<Index> candidates = p;
    for (Index v : candidates) {
      if (adj_(pivot, v)) continue;
      std::vector<Index> np, nx;
      for (Index u : p)
        if (adj_(v, u)) np.push_back(u);
      for (Index u : x)
        if (adj_(v, u)) nx.push_back(u);
      r.push_back(v);
      expand(r, np, nx);
      r.pop_back();
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  }

  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adj_;
  std::size_t limit_;
  std::vector<std::vector<Index>> out_;
};

}  // namespace detail

/// Searches for a correlation matrix M with G_X = M ∘ G_Y.
///
/// Free entries start at 0. If G_Y has no zero entries M is fully forced and
/// only its PSD-ness is tested. An Infeasible result always carries a fully
/// forced principal submatrix with eigenvalue below -psd_eps, or a
/// separating matrix (see dual_certificate); anything else that fails to
/// converge is reported as Inconclusive.
inline CorrelationCompletion complete_correlation(const CMatrix& GX, const CMatrix& GY,
                                                  const Tolerance& tol, int max_iters = 10000) {
  if (GX.rows() != GX.cols() || GX.rows() != GY.rows() || GY.rows() != GY.cols()) {
    throw DimensionError("gram matrices must be square of equal size");
  }
  const Index k = GX.rows();
  CorrelationCompletion out;
  out.forced = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(k, k, false);
  out.forced_values = CMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    out.forced(i, i) = true;
    out.forced_values(i, i) = 1.0;
    for (Index j = i + 1; j < k; ++j) {
      if (std::abs(GY(i, j)) > tol.abs_eps) {
        const Complex v = GX(i, j) / GY(i, j);
        out.forced(i, j) = out.forced(j, i) = true;
        out.forced_values(i, j) = v;
        out.forced_values(j, i) = std::conj(v);
      } else if (std::abs(GX(i, j)) > tol.abs_eps) {
        throw PreconditionError("zero pattern violated at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
      } else {
        out.free_pattern.emplace_back(i, j);
      }
    }
  }

  auto residual_of = [&](const CMatrix& M) {
    double r = 0.0;
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) r = std::max(r, std::abs(GX(i, j) - M(i, j) * GY(i, j)));
    return r;
  };
  auto project_affine = [&](const CMatrix& a) {
    CMatrix h = 0.5 * (a + a.adjoint());
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j)
        if (out.forced(i, j)) h(i, j) = out.forced_values(i, j);
    return h;
  };
  auto accept = [&](const CMatrix& M, double lam, int iters) {
    out.status = CompletionStatus::feasible;
    out.M = M;
    out.min_eigenvalue = lam;
    out.residual = residual_of(M);
    out.iterations = iters;
    return out;
  };

  // Certificates: fully forced principal submatrices that are not PSD.
  {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adj = out.forced;
    for (Index i = 0; i < k; ++i) adj(i, i) = false;
    const auto cliques = detail::CliqueEnumerator(adj, 200000).run();
    double worst = 0.0;
    for (const auto& c : cliques) {
      const Index s = static_cast<Index>(c.size());
      CMatrix sub(s, s);
      for (Index a = 0; a < s; ++a)
        for (Index b = 0; b < s; ++b) sub(a, b) = out.forced_values(c[a], c[b]);
      const double lam = min_hermitian_eigenvalue(sub);
      if (lam < -tol.psd_eps && lam < worst) {
        worst = lam;
        out.certificate_indices = c;
        out.certificate = sub;
      }
    }
    if (!out.certificate_indices.empty()) {
      out.status = CompletionStatus::infeasible;
      out.M = project_affine(out.forced_values);
      out.min_eigenvalue = worst;
      out.residual = residual_of(out.M);
      out.reason = "fully specified principal submatrix has eigenvalue " + std::to_string(worst);
      return out;
    }
  }

  CMatrix x = project_affine(out.forced_values);
  double lam = min_hermitian_eigenvalue(x);
  if (lam >= -tol.psd_eps) return accept(x, lam, 0);
  if (out.free_pattern.empty()) {
    // Fully forced and not PSD; the whole matrix is its own certificate, which
    // the clique scan above would already have returned.
    throw NumericalError("fully forced matrix escaped the certificate scan");
  }

  CMatrix p = CMatrix::Zero(k, k);
  CMatrix q = CMatrix::Zero(k, k);
  double gap = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const CMatrix y = detail::project_psd(x + p);
    p = x + p - y;
    const CMatrix xn = project_affine(y + q);
    q = y + q - xn;
    x = xn;
    gap = (x - y).norm();
    lam = min_hermitian_eigenvalue(x);
    if (lam >= -tol.psd_eps) {
      out.gap = gap;
      return accept(x, lam, it);
    }
  }
  // Dykstra lands on the boundary of a thin feasible set only slowly. Aiming
  // at a shrunken cone reaches the interior in finitely many steps whenever
  // a completion with that much slack exists; the acceptance test is still
  // the exact one on the affine iterate.
  int extra = 0;
  for (const double floor : {1e-2, 1e-3, 1e-4}) {
    CMatrix z = x;
    for (int it = 1; it <= max_iters / 4; ++it) {
      z = project_affine(detail::project_psd(z, floor));
      ++extra;
      const double lz = min_hermitian_eigenvalue(z);
      if (lz >= -tol.psd_eps) {
        out.gap = gap;
        return accept(z, lz, max_iters + extra);
      }
    }
  }

  // Alternating projections approach a closest pair (a, s) of the affine set
  // and the PSD cone; s - a then separates them.
  {
    const CMatrix F = project_affine(out.forced_values);
    auto separates = [&](CMatrix W) {
      W = 0.5 * (W + W.adjoint());
      for (const auto& [i, j] : out.free_pattern) W(i, j) = W(j, i) = 0.0;
      const double shift = std::max(0.0, -min_hermitian_eigenvalue(W));
      W += shift * CMatrix::Identity(k, k);
      const double tr = W.trace().real();
      const double inner = (W.conjugate().cwiseProduct(F)).sum().real();
      const double margin = tol.psd_eps * tr + 1e-12 * W.norm() * static_cast<double>(k);
      if (tr > 0.0 && inner < -margin) {
        out.dual_certificate = W / tr;
        return true;
      }
      return false;
    };
    CMatrix a = F;
    for (int it = 1; it <= max_iters; ++it) {
      const CMatrix s = detail::project_psd(a);
      if ((it % 25 == 0 || it == max_iters) && separates(s - a)) {
        out.status = CompletionStatus::infeasible;
        out.M = x;
        out.min_eigenvalue = lam;
        out.residual = residual_of(x);
        out.gap = (s - a).norm();
        out.iterations = max_iters + extra + it;
        out.reason = "separating PSD matrix supported on the forced pattern";
        return out;
      }
      a = project_affine(s);
    }
  }

  out.status = CompletionStatus::inconclusive;
  out.M = x;
  out.min_eigenvalue = lam;
  out.residual = residual_of(x);
  out.gap = gap;
  out.iterations = max_iters;
  out.reason = "no PSD completion found within the iteration limit";
  return out;
}

struct SinglePartyResult {
  Status status = Status::inconclusive;
  CMatrix GX;
  CMatrix GY;
  ZeroPatternResult zero_pattern;
  std::optional<CorrelationCompletion> completion;
};

/// Single-party criterion on raw vector families (sources -> targets).
inline SinglePartyResult single_party_transformable(const std::vector<CVector>& xs,
                                                    const std::vector<CVector>& ys,
                                                    const Tolerance& tol, int max_iters = 10000) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw DimensionError("single-party test needs equally many (>= 1) sources and targets");
  }
  SinglePartyResult out;
  out.GX = gram_matrix(xs, tol);
  out.GY = gram_matrix(ys, tol);
  out.zero_pattern = zero_pattern_check(out.GX, out.GY, tol);
  if (out.zero_pattern.finding == Finding::impossible) {
    out.status = Status::impossible;
    return out;
  }
  out.completion = complete_correlation(out.GX, out.GY, tol, max_iters);
  switch (out.completion->status) {
    case CompletionStatus::feasible:
      out.status = Status::certified;
      break;
    case CompletionStatus::infeasible:
      out.status = Status::impossible;
      break;
    case CompletionStatus::inconclusive:
      out.status = Status::inconclusive;
      break;
  }
  return out;
}

inline SinglePartyResult single_party_transformable(const std::vector<BipartiteState>& xs,
                                                    const std::vector<BipartiteState>& ys,
                                                    const Tolerance& tol, int max_iters = 10000) {
  std::vector<CVector> a, b;
  for (const auto& s : xs) a.push_back(s.amplitudes);
  for (const auto& s : ys) b.push_back(s.amplitudes);
  return single_party_transformable(a, b, tol, max_iters);
}

}  // namespace lotx

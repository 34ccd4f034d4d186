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

// Spectrum-based necessary conditions for a local-operations map:
// rank divisibility, the singular-value peeling algorithm that decides
// whether X and R ⊗ Y can share their nonzero singular values, and the
// cross-pair eigenvalue condition on X_i X_j^* versus Y_i Y_j^*.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lotx/errors.hpp"
#include "lotx/finding.hpp"
#include "lotx/linalg.hpp"

namespace lotx {

/// Magnitude descending, then phase ascending.
inline void canonical_sort(std::vector<Complex>& values) {
  std::stable_sort(values.begin(), values.end(), [](Complex a, Complex b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
}

struct SpectralProfile {
  std::vector<Complex> values;
  std::string source;

  SpectralProfile() = default;
  SpectralProfile(std::vector<Complex> v, std::string src)
      : values(std::move(v)), source(std::move(src)) {
    canonical_sort(values);
  }

  static SpectralProfile of_reals(const std::vector<double>& v, std::string src) {
    return SpectralProfile(std::vector<Complex>(v.begin(), v.end()), std::move(src));
  }

  std::vector<double> magnitudes() const {
    std::vector<double> out;
    for (Complex c : values) out.push_back(std::abs(c));
    return out;
  }
  std::size_t size() const { return values.size(); }
};

/// Assignment of one alpha value to gamma_u * beta_v.
struct PeelMatch {
  std::size_t alpha_index = 0;
  std::size_t block = 0;
  std::size_t beta_index = 0;
};

struct RatioWitness {
  std::vector<double> gammas;
  bool feasible = false;
  // 0: |alpha| / |beta| is not an integer; i >= 1: S_i is not contained in A_i.
  std::optional<int> failure_step;
  // alpha_index refers to the caller's alpha order, beta_index to beta's.
  std::vector<PeelMatch> matches;
};

/// Decides whether the multiset alpha equals {gamma_u * beta_v} for some
/// positive gammas, by repeatedly dividing the largest remaining alpha by
/// the largest beta and removing the scaled copy of beta.
inline RatioWitness peel(const std::vector<double>& alpha, const std::vector<double>& beta,
                         const Tolerance& tol) {
  if (alpha.empty() || beta.empty()) throw PreconditionError("peel needs non-empty profiles");
  for (double a : alpha)
    if (!(a > 0.0)) throw PreconditionError("peel needs positive alpha values");
  for (double b : beta)
    if (!(b > 0.0)) throw PreconditionError("peel needs positive beta values");

  RatioWitness w;
  if (alpha.size() % beta.size() != 0) {
    w.failure_step = 0;
    return w;
  }
  const std::size_t r = alpha.size() / beta.size();

  std::vector<std::size_t> beta_order(beta.size());
  std::iota(beta_order.begin(), beta_order.end(), 0);
  std::stable_sort(beta_order.begin(), beta_order.end(),
                   [&](std::size_t a, std::size_t b) { return beta[a] > beta[b]; });
  const double beta_max = beta[beta_order.front()];

  std::vector<std::size_t> remaining(alpha.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::stable_sort(remaining.begin(), remaining.end(),
                   [&](std::size_t a, std::size_t b) { return alpha[a] > alpha[b]; });

  for (std::size_t step = 0; step < r; ++step) {
    const double gamma = alpha[remaining.front()] / beta_max;
    std::vector<PeelMatch> block;
    for (std::size_t v : beta_order) {
      const double want = beta[v] * gamma;
      std::size_t best = remaining.size();
      double best_err = 0.0;
      for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
        const double got = alpha[remaining[pos]];
        if (!tol.matches(got, want)) continue;
        const double err = std::abs(got - want);
        if (best == remaining.size() || err < best_err) {
          best = pos;
          best_err = err;
        }
      }
      if (best == remaining.size()) {
        w.failure_step = static_cast<int>(step + 1);
        w.matches.clear();
        return w;
      }
      block.push_back({remaining[best], step, v});
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    w.gammas.push_back(gamma);
    w.matches.insert(w.matches.end(), block.begin(), block.end());
  }
  w.feasible = remaining.empty();
  return w;
}

inline RatioWitness peel(const SpectralProfile& alpha, const SpectralProfile& beta,
                         const Tolerance& tol) {
  return peel(alpha.magnitudes(), beta.magnitudes(), tol);
}

struct RankDivisibility {
  Index rank_x = 0;
  Index rank_y = 0;
  std::optional<Index> ell;  // rank_x / rank_y when integral

  bool possible() const { return ell.has_value(); }
};

/// rank(X) must be a multiple of rank(Y): E11 ⊗ X and R ⊗ Y share singular values.
inline RankDivisibility rank_divisibility(const CMatrix& X, const CMatrix& Y, const Tolerance& tol) {
  if (Y.norm() <= tol.abs_eps) throw ZeroMatrixError("output state matrix is zero");
  RankDivisibility out;
  out.rank_x = numerical_rank(X, tol);
  out.rank_y = numerical_rank(Y, tol);
  if (out.rank_x % out.rank_y == 0) out.ell = out.rank_x / out.rank_y;
  return out;
}

// ---------------------------------------------------------------------------
// Cross-pair eigenvalue condition.
// ---------------------------------------------------------------------------

/// Largest multiset handled by the partition search.
inline constexpr std::size_t kMaxPartitionSize = 12;

namespace detail {

struct ScaledMatch {
  double rel = 0.0;
  double abs = 0.0;
  bool operator()(Complex a, Complex b) const {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
  }
};

inline bool scaled_partition_search(std::vector<Complex> remaining, const std::vector<Complex>& ny,
                                    const ScaledMatch& match, std::vector<Complex>& gammas,
                                    std::vector<std::vector<Complex>>& blocks) {
  if (remaining.empty()) return true;
  canonical_sort(remaining);
  const Complex pivot = remaining.front();
  const double top = std::abs(ny.front());

  std::vector<Complex> tried;
  for (Complex y : ny) {
    if (!match(std::abs(y), top)) break;  // ny is canonically sorted
    bool seen = false;
    for (Complex t : tried) seen = seen || match(t, y);
    if (seen) continue;
    tried.push_back(y);

    const Complex gamma = pivot / y;
    std::vector<Complex> rest = remaining;
    std::vector<Complex> block;
    bool ok = true;
    for (Complex v : ny) {
      const Complex want = gamma * v;
      std::size_t best = rest.size();
      double best_err = 0.0;
      for (std::size_t pos = 0; pos < rest.size(); ++pos) {
        if (!match(rest[pos], want)) continue;
        const double err = std::abs(rest[pos] - want);
        if (best == rest.size() || err < best_err) {
          best = pos;
          best_err = err;
        }
      }
      if (best == rest.size()) {
        ok = false;
        break;
      }
      block.push_back(rest[best]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
    }
    if (!ok) continue;
    gammas.push_back(gamma);
    blocks.push_back(block);
    if (scaled_partition_search(std::move(rest), ny, match, gammas, blocks)) return true;
    gammas.pop_back();
    blocks.pop_back();
  }
  return false;
}

}  // namespace detail

struct ScaledPartition {
  bool found = false;
  std::vector<Complex> gammas;
  std::vector<std::vector<Complex>> blocks;
};

/// Searches for complex gammas and a partition of nx into blocks with each
/// block equal to gamma_u * ny. Exact: every admissible block containing the
/// largest remaining element is tried. nx.size() must be a multiple of
/// ny.size() and at most kMaxPartitionSize.
inline ScaledPartition find_scaled_partition(std::vector<Complex> nx, std::vector<Complex> ny,
                                             double rel, double abs) {
  if (nx.size() > kMaxPartitionSize) {
    throw SizeLimitError("partition search capped at " + std::to_string(kMaxPartitionSize) +
                         " values, got " + std::to_string(nx.size()));
  }
  if (ny.empty() || nx.size() % ny.size() != 0) {
    throw PreconditionError("partition sizes are not commensurate");
  }
  canonical_sort(nx);
  canonical_sort(ny);
  ScaledPartition out;
  out.found = detail::scaled_partition_search(nx, ny, detail::ScaledMatch{rel, abs}, out.gammas,
                                              out.blocks);
  if (!out.found) {
    out.gammas.clear();
    out.blocks.clear();
  }
  return out;
}

struct CrossPairResult {
  Finding finding = Finding::inconclusive;
  SpectralProfile x_side;  // nonzero eigenvalues of X_i X_j^*
  SpectralProfile y_side;  // nonzero eigenvalues of Y_i Y_j^*
  std::vector<Complex> gammas;
  std::vector<std::vector<Complex>> blocks;
  std::string reason;
};

namespace detail {

// Splits eigenvalues into zero / nonzero; returns false if any value falls in
// the ambiguous band between abs_eps * scale and sqrt(abs_eps) * scale.
inline bool split_nonzero(const std::vector<Complex>& ev, double scale, const Tolerance& tol,
                          std::vector<Complex>& nonzero) {
  const double zero_cut = tol.abs_eps * scale;
  const double nonzero_cut = std::sqrt(tol.abs_eps) * scale;
  bool clean = true;
  for (Complex v : ev) {
    const double a = std::abs(v);
    if (a <= zero_cut) continue;
    if (a < nonzero_cut) clean = false;
    nonzero.push_back(v);
  }
  return clean;
}

}  // namespace detail

/// The nonzero eigenvalues of X_i X_j^* must be the union of copies of the
/// nonzero eigenvalues of Y_i Y_j^* scaled by complex gammas (one gamma per
/// nonzero eigenvalue of R_i R_j^*).
inline CrossPairResult cross_pair_test(const CMatrix& Xi, const CMatrix& Xj, const CMatrix& Yi,
                                       const CMatrix& Yj, const Tolerance& tol,
                                       const std::string& label = "") {
  if (Xi.rows() != Xj.rows() || Xi.cols() != Xj.cols() || Yi.rows() != Yj.rows() ||
      Yi.cols() != Yj.cols() || Xi.rows() != Yi.rows()) {
    throw DimensionError("cross pair test needs conforming matrices");
  }
  CrossPairResult out;
  const double scale_x = std::max(Xi.norm() * Xj.norm(), 1e-300);
  const double scale_y = std::max(Yi.norm() * Yj.norm(), 1e-300);
  std::vector<Complex> nx, ny;
  const bool clean_x = detail::split_nonzero(eigenvalues(Xi * Xj.adjoint()), scale_x, tol, nx);
  const bool clean_y = detail::split_nonzero(eigenvalues(Yi * Yj.adjoint()), scale_y, tol, ny);
  out.x_side = SpectralProfile(nx, "eig(X" + label + ")");
  out.y_side = SpectralProfile(ny, "eig(Y" + label + ")");

  if (!clean_x || !clean_y) {
    out.finding = Finding::inconclusive;
    out.reason = "eigenvalue too close to zero to classify";
    return out;
  }
  if (ny.empty()) {
    out.finding = nx.empty() ? Finding::pass : Finding::impossible;
    out.reason = nx.empty() ? "both products nilpotent"
                            : "Y-side product is nilpotent but X-side has nonzero eigenvalues";
    return out;
  }
  if (nx.empty()) {
    out.finding = Finding::pass;
    out.reason = "X-side product nilpotent (no gamma needed)";
    return out;
  }
  if (nx.size() % ny.size() != 0) {
    out.finding = Finding::inconclusive;
    out.reason = "nonzero eigenvalue counts are not commensurate";
    return out;
  }
  try {
    const ScaledPartition part = find_scaled_partition(
        out.x_side.values, out.y_side.values, std::sqrt(tol.rel_eps), tol.abs_eps * scale_x);
    if (part.found) {
      out.finding = Finding::pass;
      out.gammas = part.gammas;
      out.blocks = part.blocks;
    } else {
      out.finding = Finding::impossible;
      out.reason = "no partition of the X-side eigenvalues into scaled copies of the Y side";
    }
  } catch (const SizeLimitError& e) {
    out.finding = Finding::inconclusive;
    out.reason = e.what();
  }
  return out;
}

}  // namespace lotx

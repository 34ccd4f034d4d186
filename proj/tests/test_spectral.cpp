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

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <numeric>

#include "lotx/catalog.hpp"
#include "lotx/spectral.hpp"
#include "synth.hpp"

using namespace lotx;
using lotx::testing::rng_for;
using lotx::testing::uniform;
using lotx::testing::uniform_int;

namespace {

const std::string kFixtures = LOTX_FIXTURES_DIR;

// Exhaustive oracle: alpha equals {gamma_u beta_v} iff some ordering of alpha,
// cut into consecutive groups of |beta|, makes every sorted group a multiple
// of sorted beta.
bool peel_oracle(std::vector<double> alpha, std::vector<double> beta, double tol) {
  if (alpha.size() % beta.size() != 0) return false;
  std::sort(beta.begin(), beta.end());
  std::sort(alpha.begin(), alpha.end());
  const std::size_t b = beta.size();
  do {
    bool ok = true;
    for (std::size_t g = 0; ok && g < alpha.size(); g += b) {
      std::vector<double> grp(alpha.begin() + g, alpha.begin() + g + b);
      std::sort(grp.begin(), grp.end());
      const double gamma = grp[0] / beta[0];
      for (std::size_t v = 0; ok && v < b; ++v) ok = std::abs(grp[v] - gamma * beta[v]) <= tol;
    }
    if (ok) return true;
  } while (std::next_permutation(alpha.begin(), alpha.end()));
  return false;
}

bool multiset_equal(std::vector<Complex> a, std::vector<Complex> b, double tol) {
  if (a.size() != b.size()) return false;
  for (Complex z : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](Complex w) { return std::abs(z - w) <= tol; });
    if (it == b.end()) return false;
    b.erase(it);
  }
  return true;
}

// Exhaustive oracle for complex scaled partitions.
bool partition_oracle(std::vector<Complex> nx, const std::vector<Complex>& ny, double tol) {
  if (nx.size() % ny.size() != 0) return false;
  std::vector<std::size_t> idx(nx.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t b = ny.size();
  do {
    bool ok = true;
    for (std::size_t g = 0; ok && g < nx.size(); g += b) {
      std::vector<Complex> grp;
      for (std::size_t t = g; t < g + b; ++t) grp.push_back(nx[idx[t]]);
      bool any = false;
      for (Complex y : ny) {
        const Complex gamma = grp[0] / y;
        std::vector<Complex> scaled;
        for (Complex w : ny) scaled.push_back(gamma * w);
        if (multiset_equal(grp, scaled, tol)) {
          any = true;
          break;
        }
      }
      ok = any;
    }
    if (ok) return true;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return false;
}

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

TEST(Peel, ReproducesWorkedExample) {
  const Tolerance tol;
  const std::vector<double> alpha{4, 2, 2, 1};
  struct Case {
    std::vector<double> beta;
    bool feasible;
    std::vector<double> gammas;
  };
  const std::vector<Case> cases{{{2, 1}, true, {2, 1}},
                                {{4, 2}, true, {1, 0.5}},
                                {{2, 1, 1}, false, {}},
                                {{2, 0.5}, false, {}},
                                {{1, 1}, false, {}}};
  for (const Case& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const RatioWitness w = peel(alpha, c.beta, tol);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_EQ(w.feasible, c.feasible);
    EXPECT_EQ(w.gammas.size(), c.feasible ? c.gammas.size() : w.gammas.size());
    if (c.feasible) {
      for (std::size_t u = 0; u < c.gammas.size(); ++u) EXPECT_EQ(w.gammas[u], c.gammas[u]);
    }
    EXPECT_LT(ms, 1.0);
  }
}

TEST(Peel, FailureStepIsReported) {
  const Tolerance tol;
  EXPECT_EQ(peel({4, 2, 2, 1}, {2, 1, 1}, tol).failure_step, 0);
  EXPECT_EQ(peel({4, 2, 2, 1}, {1, 1}, tol).failure_step, 1);
  EXPECT_EQ(peel({4, 2, 2, 1}, {2, 0.5}, tol).failure_step, 2);
}

TEST(Peel, RejectsEmptyOrNonpositive) {
  const Tolerance tol;
  EXPECT_THROW(peel({}, {1}, tol), PreconditionError);
  EXPECT_THROW(peel({1}, {}, tol), PreconditionError);
  EXPECT_THROW(peel({1, 0}, {1}, tol), PreconditionError);
  EXPECT_THROW(peel({1}, {-1}, tol), PreconditionError);
}

TEST(Peel, AgreesWithExhaustiveOracle) {
  const Tolerance tol;
  int feasible = 0;
  for (int t = 0; t < 300; ++t) {
    auto rng = rng_for(30, t);
    const int b = uniform_int(rng, 1, 3), r = uniform_int(rng, 1, 6 / b);
    std::vector<double> beta(b), alpha;
    for (double& x : beta) x = static_cast<double>(uniform_int(rng, 1, 4));
    for (int u = 0; u < r; ++u) {
      const double gamma = static_cast<double>(uniform_int(rng, 1, 4)) / 2.0;
      for (double x : beta) alpha.push_back(gamma * x);
    }
    if (t % 2 == 1) {
      // Perturb one value onto the integer-ish grid so collisions stay likely.
      alpha[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(alpha.size()) - 1))] =
          static_cast<double>(uniform_int(rng, 1, 8)) / 2.0;
    }
    std::shuffle(alpha.begin(), alpha.end(), rng);
    const bool want = peel_oracle(alpha, beta, 1e-12);
    EXPECT_EQ(peel(alpha, beta, tol).feasible, want) << "trial " << t;
    feasible += want ? 1 : 0;
  }
  EXPECT_GT(feasible, 100);
  EXPECT_LT(feasible, 300);
}

TEST(Peel, PermutationInvariantAndScaleCovariant) {
  const Tolerance tol;
  for (int t = 0; t < 100; ++t) {
    auto rng = rng_for(31, t);
    const int b = uniform_int(rng, 1, 3), r = uniform_int(rng, 1, 3);
    std::vector<double> beta(b), alpha;
    for (double& x : beta) x = uniform(rng, 0.1, 1.0);
    for (int u = 0; u < r; ++u) {
      const double gamma = uniform(rng, 0.1, 2.0);
      for (double x : beta) alpha.push_back(gamma * x);
    }
    if (t % 3 == 0) alpha[0] *= 1.37;
    const RatioWitness base = peel(alpha, beta, tol);
    std::vector<double> a2 = alpha, b2 = beta;
    std::shuffle(a2.begin(), a2.end(), rng);
    std::shuffle(b2.begin(), b2.end(), rng);
    const RatioWitness perm = peel(a2, b2, tol);
    ASSERT_EQ(perm.feasible, base.feasible);
    const double c = uniform(rng, 0.5, 3.0);
    std::vector<double> a3 = alpha;
    for (double& x : a3) x *= c;
    const RatioWitness scaled = peel(a3, beta, tol);
    ASSERT_EQ(scaled.feasible, base.feasible);
    if (!base.feasible) continue;
    ASSERT_EQ(perm.gammas.size(), base.gammas.size());
    ASSERT_EQ(scaled.gammas.size(), base.gammas.size());
    const auto g0 = sorted_desc(base.gammas), g1 = sorted_desc(perm.gammas),
               g2 = sorted_desc(scaled.gammas);
    for (std::size_t u = 0; u < g0.size(); ++u) {
      EXPECT_NEAR(g1[u], g0[u], 1e-12);
      EXPECT_NEAR(g2[u], c * g0[u], 1e-12);
    }
    // Reconstruction: {gamma_u beta_v} is alpha.
    std::vector<double> rebuilt;
    for (double g : base.gammas)
      for (double x : beta) rebuilt.push_back(g * x);
    const auto ra = sorted_desc(alpha), rb = sorted_desc(rebuilt);
    for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_TRUE(tol.matches(ra[i], rb[i]));
    // Every alpha index is matched exactly once.
    std::vector<int> used(alpha.size(), 0);
    for (const PeelMatch& mt : base.matches) ++used[mt.alpha_index];
    for (int u : used) EXPECT_EQ(u, 1);
  }
}

TEST(RankDivisibility, Basics) {
  const Tolerance tol;
  CMatrix X = CMatrix::Zero(3, 3), Y = CMatrix::Zero(3, 3);
  X(0, 0) = X(1, 1) = X(2, 2) = 1.0;
  Y(0, 0) = 1.0;
  EXPECT_EQ(rank_divisibility(X, Y, tol).ell, 3);
  Y(1, 1) = 1.0;
  EXPECT_FALSE(rank_divisibility(X, Y, tol).possible());
  EXPECT_THROW(rank_divisibility(X, CMatrix::Zero(3, 3), tol), ZeroMatrixError);
}

TEST(ScaledPartition, AgreesWithExhaustiveOracle) {
  int found = 0;
  for (int t = 0; t < 200; ++t) {
    auto rng = rng_for(32, t);
    const int b = uniform_int(rng, 1, 3), r = uniform_int(rng, 1, 6 / b);
    std::vector<Complex> ny(b), nx;
    for (Complex& z : ny) z = Complex(uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)) + 0.5;
    for (int u = 0; u < r; ++u) {
      const Complex gamma(uniform_int(rng, -1, 1), uniform_int(rng, 1, 2));
      for (Complex z : ny) nx.push_back(gamma * z);
    }
    if (t % 2 == 1) nx.back() += Complex(0.5, 0.0);
    std::shuffle(nx.begin(), nx.end(), rng);
    const bool want = partition_oracle(nx, ny, 1e-9);
    const ScaledPartition got = find_scaled_partition(nx, ny, 1e-9, 1e-12);
    EXPECT_EQ(got.found, want) << "trial " << t;
    found += want ? 1 : 0;
    if (got.found) {
      // The returned blocks reproduce nx.
      std::vector<Complex> all;
      for (std::size_t u = 0; u < got.gammas.size(); ++u) {
        std::vector<Complex> scaled;
        for (Complex z : ny) scaled.push_back(got.gammas[u] * z);
        EXPECT_TRUE(multiset_equal(got.blocks[u], scaled, 1e-9));
        all.insert(all.end(), got.blocks[u].begin(), got.blocks[u].end());
      }
      EXPECT_TRUE(multiset_equal(all, nx, 1e-9));
    }
  }
  EXPECT_GT(found, 80);
}

TEST(ScaledPartition, SizeCap) {
  std::vector<Complex> nx(13, Complex(1, 0)), ny(1, Complex(1, 0));
  EXPECT_THROW(find_scaled_partition(nx, ny, 1e-9, 1e-12), SizeLimitError);
  EXPECT_THROW(find_scaled_partition(std::vector<Complex>(3, 1.0), std::vector<Complex>(2, 1.0),
                                     1e-9, 1e-12),
               PreconditionError);
}

TEST(CrossPair, JointSystemIsImpossible) {
  const TransformProblem p = load_problem_file(kFixtures + "/sec3_joint.json");
  const Tolerance tol;
  const CrossPairResult r =
      cross_pair_test(p.pairs[0].input.matrix(), p.pairs[1].input.matrix(),
                      p.pairs[0].output.matrix(), p.pairs[1].output.matrix(), tol);
  EXPECT_EQ(r.finding, Finding::impossible);
  std::vector<Complex> want{0.384, -0.384, 0.096, -0.096};
  EXPECT_TRUE(multiset_equal(r.x_side.values, want, 1e-12));
  std::vector<Complex> want_y{1.6 / std::sqrt(5.0), 0.6 / std::sqrt(5.0)};
  EXPECT_TRUE(multiset_equal(r.y_side.values, want_y, 1e-12));
  // Independent confirmation by exhaustive search.
  EXPECT_FALSE(partition_oracle(r.x_side.values, r.y_side.values, 1e-6));
}

TEST(CrossPair, FinalTwoPairExampleFailsAlready) {
  const TransformProblem p = load_problem_file(kFixtures + "/ex2p3_final.json");
  const CrossPairResult r =
      cross_pair_test(p.pairs[0].input.matrix(), p.pairs[1].input.matrix(),
                      p.pairs[0].output.matrix(), p.pairs[1].output.matrix(), Tolerance{});
  EXPECT_EQ(r.finding, Finding::impossible);
  EXPECT_FALSE(partition_oracle(r.x_side.values, r.y_side.values, 1e-6));
}

TEST(CrossPair, DiagonalCaseMatchesPeelOnSquares) {
  const Tolerance tol;
  int feasible = 0;
  for (int t = 0; t < 100; ++t) {
    auto rng = rng_for(33, t);
    const Index d = 4;
    const int b = uniform_int(rng, 1, 2), r = uniform_int(rng, 1, 4 / b);
    std::vector<double> beta(b), alpha;
    for (double& x : beta) x = static_cast<double>(uniform_int(rng, 1, 3));
    for (int u = 0; u < r; ++u) {
      const double g = static_cast<double>(uniform_int(rng, 1, 3));
      for (double x : beta) alpha.push_back(g * x);
    }
    if (t % 2) alpha[0] += 1.0;
    const BipartiteState xs = detail::diagonal_state(alpha, d);
    const BipartiteState ys = detail::diagonal_state(beta, d);
    // Random local unitaries leave both tests unchanged.
    const CMatrix X = haar_unitary(rng, d) * xs.matrix() * haar_unitary(rng, d);
    const CMatrix Y = haar_unitary(rng, d) * ys.matrix() * haar_unitary(rng, d);
    const auto sx = nonzero_singular_values(X, tol), sy = nonzero_singular_values(Y, tol);
    std::vector<double> sx2, sy2;
    for (double s : sx) sx2.push_back(s * s);
    for (double s : sy) sy2.push_back(s * s);
    const bool want = peel(sx2, sy2, tol).feasible;
    EXPECT_EQ(peel(sx, sy, tol).feasible, want);
    const CrossPairResult cp = cross_pair_test(X, X, Y, Y, tol);
    ASSERT_NE(cp.finding, Finding::inconclusive) << cp.reason;
    EXPECT_EQ(cp.finding == Finding::pass, want) << "trial " << t;
    feasible += want ? 1 : 0;
  }
  EXPECT_GT(feasible, 30);
  EXPECT_LT(feasible, 100);
}

TEST(CrossPair, NilpotentYSide) {
  const Tolerance tol;
  CMatrix Xi = CMatrix::Zero(2, 2), Xj = CMatrix::Zero(2, 2);
  Xi(0, 0) = 1.0;
  Xj(0, 0) = 1.0;
  CMatrix Yi = CMatrix::Zero(2, 2), Yj = CMatrix::Zero(2, 2);
  Yi(0, 0) = 1.0;
  Yj(1, 1) = 1.0;
  EXPECT_EQ(cross_pair_test(Xi, Xj, Yi, Yj, tol).finding, Finding::impossible);
  EXPECT_EQ(cross_pair_test(Yi, Yj, Yi, Yj, tol).finding, Finding::pass);
  EXPECT_THROW(cross_pair_test(Xi, CMatrix(3, 2), Yi, Yj, tol), DimensionError);
}

TEST(CrossPair, AmbiguousEigenvalueIsInconclusive) {
  const Tolerance tol;
  CMatrix Xi = CMatrix::Zero(2, 2), Xj = CMatrix::Zero(2, 2);
  Xi(0, 0) = 1.0;
  Xj(0, 0) = 1e-6;  // between abs_eps and sqrt(abs_eps) relative to the scale
  Xj(1, 1) = 1.0;
  CMatrix Yi = Xi, Yj = Xj;
  EXPECT_EQ(cross_pair_test(Xi, Xj, Yi, Yj, tol).finding, Finding::inconclusive);
}

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

// Dense complex linear algebra shared by every module: the row-major
// vector <-> matrix state correspondence, SVD and eigen wrappers, Kronecker
// and Schur products, unitary helpers and tolerance-aware comparisons.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lotx/errors.hpp"

namespace lotx {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds used throughout the verifier.
///
/// Two scalars a, b "match" when |a - b| <= rel_eps * max(|a|, |b|) + abs_eps.
/// Singular values below abs_eps * s_max count as zero for rank decisions.
/// psd_eps bounds how negative an eigenvalue may be for a matrix to count
/// as positive semidefinite.
struct Tolerance {
  double abs_eps = 1e-9;
  double rel_eps = 1e-9;
  double psd_eps = 1e-7;

  void validate() const {
    if (!(abs_eps >= 0.0) || !(rel_eps >= 0.0) || !(psd_eps >= 0.0)) {
      throw Error("tolerance fields must be non-negative");
    }
  }

  bool matches(Complex a, Complex b) const {
    return std::abs(a - b) <= rel_eps * std::max(std::abs(a), std::abs(b)) + abs_eps;
  }
  bool matches(double a, double b) const {
    return std::abs(a - b) <= rel_eps * std::max(std::abs(a), std::abs(b)) + abs_eps;
  }
};

inline bool all_finite(const CMatrix& a) {
  for (Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i].real()) || !std::isfinite(a.data()[i].imag())) return false;
  }
  return true;
}

inline void require_finite(const CMatrix& a, const std::string& what) {
  if (!all_finite(a)) throw NumericalError(what + " has non-finite entries");
}

// ---------------------------------------------------------------------------
// State <-> matrix correspondence.
//
// A state sum_{ij} l_ij |i>|j> is stored as the vector (l_11, l_12, ..., l_mn),
// i.e. entry i*n + j (zero based) holds X(i, j). This is x = vec(X^t) with vec
// the usual column-stacking operator, so
//   matrix_to_vec(A X B) = (A ⊗ B^t) matrix_to_vec(X)
//   vec(A X B)           = (B^t ⊗ A) vec(X).
// ---------------------------------------------------------------------------

inline CMatrix vec_to_matrix(const CVector& x, Index m, Index n) {
  if (m <= 0 || n <= 0 || x.size() != m * n) {
    throw DimensionError("vector of length " + std::to_string(x.size()) +
                         " cannot be reshaped to " + std::to_string(m) + "x" +
                         std::to_string(n));
  }
  CMatrix X(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) X(i, j) = x(i * n + j);
  return X;
}

inline CVector matrix_to_vec(const CMatrix& X) {
  CVector x(X.size());
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) x(i * X.cols() + j) = X(i, j);
  return x;
}

/// Column-stacking vec.
inline CVector vec(const CMatrix& X) {
  CVector x(X.size());
  for (Index j = 0; j < X.cols(); ++j)
    for (Index i = 0; i < X.rows(); ++i) x(j * X.rows() + i) = X(i, j);
  return x;
}

/// A ⊗ B with block (i, j) equal to A(i, j) * B.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Entrywise (Schur / Hadamard) product.
inline CMatrix schur(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("schur product needs equal shapes");
  }
  return a.cwiseProduct(b);
}

/// p x q matrix with a single 1 at (0, 0).
inline CMatrix e11(Index p, Index q) {
  CMatrix e = CMatrix::Zero(p, q);
  e(0, 0) = 1.0;
  return e;
}

/// Reduced state on A of the state with matrix form X: tr_B |x><x| = X X*.
inline CMatrix reduced_density_a(const CMatrix& X) { return X * X.adjoint(); }

// ---------------------------------------------------------------------------
// Decompositions.
// ---------------------------------------------------------------------------

/// Thin SVD X = left * diag(values) * right^*, values descending.
struct Svd {
  CMatrix left;
  RVector values;
  CMatrix right;

  /// Number of singular values above abs_eps * values(0).
  Index rank(const Tolerance& tol) const {
    if (values.size() == 0 || values(0) <= 0.0) return 0;
    const double cut = tol.abs_eps * values(0);
    Index r = 0;
    while (r < values.size() && values(r) > cut) ++r;
    return r;
  }
};

inline Svd svd(const CMatrix& X) {
  require_finite(X, "svd input");
  if (X.size() == 0) return {CMatrix(X.rows(), 0), RVector(0), CMatrix(X.cols(), 0)};
  Eigen::JacobiSVD<CMatrix> solver(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("SVD of a " + std::to_string(X.rows()) + "x" +
                         std::to_string(X.cols()) + " matrix did not converge");
  }
  Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  const double scale = std::max(1.0, X.norm());
  const double resid =
      (out.left * out.values.cast<Complex>().asDiagonal() * out.right.adjoint() - X).norm();
  if (!(resid <= 1e-10 * scale)) {
    throw NumericalError("SVD reconstruction residual " + std::to_string(resid) +
                         " after one Jacobi pass set");
  }
  return out;
}

inline Index numerical_rank(const CMatrix& X, const Tolerance& tol) { return svd(X).rank(tol); }

/// Singular values above the rank cut, descending.
inline std::vector<double> nonzero_singular_values(const CMatrix& X, const Tolerance& tol) {
  const Svd s = svd(X);
  const Index r = s.rank(tol);
  return {s.values.data(), s.values.data() + r};
}

/// Eigenvalues of the Hermitian part of H, ascending.
inline RVector hermitian_eigenvalues(const CMatrix& H) {
  require_finite(H, "hermitian eigen input");
  const CMatrix sym = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return solver.eigenvalues();
}

inline double min_hermitian_eigenvalue(const CMatrix& H) {
  if (H.size() == 0) return 0.0;
  return hermitian_eigenvalues(H)(0);
}

/// Eigenvalues of a general square matrix.
inline std::vector<Complex> eigenvalues(const CMatrix& A) {
  require_finite(A, "eigen input");
  if (A.rows() != A.cols()) throw DimensionError("eigenvalues need a square matrix");
  if (A.size() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> solver(A, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("complex eigensolver failed on a " + std::to_string(A.rows()) +
                         "x" + std::to_string(A.rows()) + " matrix");
  }
  const CVector& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// ---------------------------------------------------------------------------
// Unitaries.
// ---------------------------------------------------------------------------

inline double unitarity_residual(const CMatrix& U) {
  if (U.rows() != U.cols()) return std::numeric_limits<double>::infinity();
  return (U * U.adjoint() - CMatrix::Identity(U.rows(), U.rows())).norm();
}

/// Unitary polar factor W Z^* of M = W S Z^*; the maximiser of Re tr(Q^* M)
/// over unitary Q (orthogonal Procrustes).
inline CMatrix polar_unitary(const CMatrix& M) {
  Eigen::JacobiSVD<CMatrix> solver(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) throw NumericalError("polar factor SVD failed");
  return solver.matrixU() * solver.matrixV().adjoint();
}

/// Orthonormal basis of the orthogonal complement of the column span of S
/// (S must have orthonormal columns).
inline CMatrix orthonormal_complement(const CMatrix& S) {
  const Index d = S.rows();
  const Index r = S.cols();
  if (r == 0) return CMatrix::Identity(d, d);
  if (r >= d) return CMatrix(d, 0);
  Eigen::HouseholderQR<CMatrix> qr(S);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  return q.rightCols(d - r);
}

/// Completes a matrix whose rows `specified` are orthonormal into a unitary.
/// Missing rows are filled in index order by Gram-Schmidt against the
/// standard basis e_1, e_2, ... (dependent candidates are skipped).
inline CMatrix complete_rows_to_unitary(const CMatrix& partial, const std::vector<Index>& specified,
                                        double eps = 1e-12) {
  const Index d = partial.cols();
  if (partial.rows() != d) throw DimensionError("row completion needs a square matrix");
  std::vector<bool> given(static_cast<std::size_t>(d), false);
  std::vector<CVector> basis;
  for (Index r : specified) {
    if (r < 0 || r >= d) throw DimensionError("specified row index out of range");
    given[static_cast<std::size_t>(r)] = true;
    basis.push_back(partial.row(r).transpose());
  }
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const Complex ip = basis[b].dot(basis[a]);
      const Complex want = a == b ? 1.0 : 0.0;
      if (std::abs(ip - want) > 1e-9) {
        throw DimensionError("specified rows are not orthonormal");
      }
    }
  }
  CMatrix out = partial;
  Index candidate = 0;
  for (Index r = 0; r < d; ++r) {
    if (given[static_cast<std::size_t>(r)]) continue;
    for (;; ++candidate) {
      if (candidate >= d) throw NumericalError("row completion ran out of basis candidates");
      CVector v = CVector::Unit(d, candidate);
      for (const CVector& b : basis) v -= b.dot(v) * b;
      const double nv = v.norm();
      if (nv > eps) {
        v /= nv;
        // clean round-off so integer fixtures stay exact
        for (Index i = 0; i < d; ++i) {
          if (std::abs(v(i).real()) < 1e-15) v(i).real(0.0);
          if (std::abs(v(i).imag()) < 1e-15) v(i).imag(0.0);
        }
        basis.push_back(v);
        out.row(r) = v.transpose();
        ++candidate;
        break;
      }
    }
  }
  return out;
}

/// Unitary mapping the orthonormal columns of `from` onto those of `to`,
/// extended by an arbitrary (deterministic) isometry between complements.
inline CMatrix complete_partial_isometry(const CMatrix& from, const CMatrix& to) {
  if (from.rows() != to.rows() || from.cols() != to.cols()) {
    throw DimensionError("partial isometry needs matching frames");
  }
  return to * from.adjoint() + orthonormal_complement(to) * orthonormal_complement(from).adjoint();
}

// ---------------------------------------------------------------------------
// Random generation (seeded; used by search and by the property tests).
// ---------------------------------------------------------------------------

inline CMatrix random_gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  return z;
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the diagonal of R
/// made real positive.
inline CMatrix haar_unitary(std::mt19937_64& rng, Index d) {
  const CMatrix z = random_gaussian(rng, d, d);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

}  // namespace lotx

// Copyright 2026 The StreamPCA Authors. All Rights Reserved.
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

// Dense spectral primitives shared by the solvers: orthonormalization,
// symmetric eigendecomposition, rank-one updates of a factored symmetric
// matrix, and Euclidean projections of a spectrum onto the (capped) Fantope
// {M : 0 <= M <= I, trace(M) = k}.

#ifndef STREAMPCA_SPECTRAL_H_
#define STREAMPCA_SPECTRAL_H_

#include <Eigen/Core>

#include "streampca/common.h"

namespace streampca {

// Factored symmetric matrix M = basis * diag(eigvals) * basis^T.
//
// basis is d x r with orthonormal columns and eigvals is sorted in
// non-increasing order. A rank-0 state keeps its dimension as basis.rows().
struct EigState {
  Eigen::MatrixXd basis;
  Eigen::VectorXd eigvals;

  Index dim() const { return basis.rows(); }
  Index rank() const { return eigvals.size(); }

  Eigen::MatrixXd Reconstruct() const;
  double Trace() const { return eigvals.sum(); }

  static EigState Zero(Index dim);
  // value * I_d, stored as a rank-d state with the canonical basis.
  static EigState ScaledIdentity(Index dim, double value);
};

// Orthonormal d x k basis of a subspace.
struct SubspaceState {
  Eigen::MatrixXd basis;
  // Fewer than k directions were available; the rest is an arbitrary
  // orthonormal completion.
  bool completed = false;
  // The k-th and (k+1)-th eigenvalues coincide, so the subspace is not unique.
  bool tie = false;

  Index dim() const { return basis.rows(); }
  Index rank() const { return basis.cols(); }
};

// Result of projecting a length-r spectrum that is implicitly padded with
// (d - r) zeros.
struct ProjectionResult {
  // Projected values of the explicit entries, in input order.
  Eigen::VectorXd eigvals;
  double shift = 0.0;
  // Number of implicit zero entries that receive padded_value; the remaining
  // implicit entries stay at zero.
  Index padded_count = 0;
  double padded_value = 0.0;

  double Sum() const {
    return eigvals.sum() + static_cast<double>(padded_count) * padded_value;
  }
};

// The (r+1) x (r+1) (or r x r when x lies in the span) symmetric matrix whose
// eigendecomposition gives the rank-one update of an EigState, and the d x m
// frame it lives in. With w = U^T x and residual norm rho, the core is
//   [diag(sigma) + eta w w^T   eta rho w ]
//   [eta rho w^T               eta rho^2 ]
// i.e. diag(sigma, 0) + eta z z^T with z = (w, rho).
struct UpdateCore {
  Eigen::MatrixXd small;
  Eigen::VectorXd diag;
  Eigen::VectorXd z;
  double eta = 0.0;
  Eigen::MatrixXd frame;
  bool grew = false;
};

// Modified Gram-Schmidt with one reorthogonalization pass. Columns keep their
// orientation (the implied R factor has a positive diagonal).
// Throws RankDeficientError naming the first dependent column.
Eigen::MatrixXd Orthonormalize(const Eigen::MatrixXd& v);

// All d eigenpairs of a symmetric matrix, eigenvalues non-increasing; equal
// eigenvalues keep the solver's order. Eigenvalues may be negative for
// indefinite input.
EigState FullSymmetricEig(const Eigen::MatrixXd& a);

// Eigendecomposition of diag(d) + rho z z^T (rho >= 0) in O(n^2) through the
// secular equation, with deflation of negligible z entries and of (nearly)
// equal diagonal entries. Eigenvalues are returned non-increasing.
EigState DiagonalPlusRankOneEig(const Eigen::VectorXd& diag,
                                const Eigen::VectorXd& z, double rho);

UpdateCore BuildUpdateCore(const EigState& state, const Eigen::VectorXd& x,
                           double eta);

// Factored form of M + eta * x * x^T in O(d r^2); never forms a d x d matrix.
// Eigenvalues at or below kRankTolerance are dropped.
EigState RankOneUpdate(const EigState& state, const Eigen::VectorXd& x,
                       double eta);

// Shift-and-clip projection of `eigvals` (padded to length `dim` with zeros)
// onto {s in [0,1]^dim : sum(s) = k}.
ProjectionResult ProjectFantope(const Eigen::VectorXd& eigvals, int k,
                                Index dim);

// As ProjectFantope, but at most `cap` entries may be nonzero. The support is
// the `cap` largest entries; explicit entries win ties against padding.
ProjectionResult ProjectCappedFantope(const Eigen::VectorXd& eigvals, int k,
                                      int cap, Index dim);

// Rebuilds a state from a projection of its spectrum. Padded entries that
// become nonzero are placed on an orthonormal completion of the basis.
EigState ApplyProjection(EigState state, const ProjectionResult& proj);

// Drops eigenpairs with eigenvalue <= tolerance.
EigState PruneSmall(EigState state, double tolerance = kRankTolerance);

// `count` orthonormal columns orthogonal to the columns of `basis`.
Eigen::MatrixXd OrthogonalComplement(const Eigen::MatrixXd& basis,
                                     Index count);

// Leading k eigenvectors of a state. Ties keep the stored order.
SubspaceState TruncateTopK(const EigState& state, int k);

// Largest principal angle (radians) between the spans of two orthonormal
// bases with the same number of columns.
double MaxPrincipalAngle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// max |Q^T Q - I|.
double OrthonormalityError(const Eigen::MatrixXd& q);

}  // namespace streampca

#endif  // STREAMPCA_SPECTRAL_H_

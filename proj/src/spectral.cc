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

#include "streampca/spectral.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace streampca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

RankDeficientError::RankDeficientError(Index column, double residual_norm)
    : Error("rank-deficient input: column " + std::to_string(column) +
            " has residual norm " + std::to_string(residual_norm)),
      column_(column),
      residual_norm_(residual_norm) {}

ParseError::ParseError(const std::string& what, Index row, Index column)
    : Error(what + " (row " + std::to_string(row) + ", column " +
            std::to_string(column) + ")"),
      row_(row),
      column_(column) {}

namespace {

inline double Clip01(double v) { return std::clamp(v, 0.0, 1.0); }

// Stable; the index arrays sorted here are short.
template <typename Less>
void InsertionSort(Index* items, Index count, Less less) {
  for (Index i = 1; i < count; ++i) {
    const Index item = items[i];
    Index j = i;
    for (; j > 0 && less(item, items[j - 1]); --j) items[j] = items[j - 1];
    items[j] = item;
  }
}

// Reorders eigenpairs so that values are non-increasing. Equal values keep
// their relative order.
void SortDescending(MatrixXd& basis, VectorXd& values) {
  const Index r = values.size();
  bool sorted = true;
  for (Index i = 1; i < r && sorted; ++i) sorted = values[i - 1] >= values[i];
  if (sorted) return;

  std::vector<Index> order(r);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] > values[b]; });
  MatrixXd sorted_basis(basis.rows(), r);
  VectorXd sorted_values(r);
  for (Index i = 0; i < r; ++i) {
    sorted_basis.col(i) = basis.col(order[i]);
    sorted_values[i] = values[order[i]];
  }
  basis = std::move(sorted_basis);
  values = std::move(sorted_values);
}

double FantopeSum(const VectorXd& values, Index pad, double shift) {
  double sum = static_cast<double>(pad) * Clip01(shift);
  for (Index i = 0; i < values.size(); ++i) sum += Clip01(values[i] + shift);
  return sum;
}

// Sweeps the sorted breakpoints of the piecewise-linear map
// shift -> sum_i clip(v_i + shift, 0, 1) and solves on the crossing segment.
double BreakpointShift(const VectorXd& values, Index pad, double k) {
  struct Event {
    double at;
    double slope;
  };
  std::vector<Event> events;
  events.reserve(2 * values.size() + 2);
  for (Index i = 0; i < values.size(); ++i) {
    events.push_back({-values[i], 1.0});
    events.push_back({1.0 - values[i], -1.0});
  }
  if (pad > 0) {
    events.push_back({0.0, static_cast<double>(pad)});
    events.push_back({1.0, -static_cast<double>(pad)});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.at < b.at; });

  double sum = 0.0;
  double slope = 0.0;
  double pos = events.front().at;
  std::size_t i = 0;
  while (i < events.size()) {
    const double at = events[i].at;
    const double sum_at = sum + slope * (at - pos);
    if (sum_at >= k && slope > 0.0) return pos + (k - sum) / slope;
    sum = sum_at;
    pos = at;
    while (i < events.size() && events[i].at == at) slope += events[i++].slope;
  }
  // Only reached when k equals the full dimension: everything saturates.
  return pos;
}

// Solves the sum constraint exactly on the active set implied by `shift`.
double RefineShift(const VectorXd& values, Index pad, double k, double shift) {
  double free_sum = 0.0;
  double saturated = 0.0;
  double free_count = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    const double v = values[i] + shift;
    if (v >= 1.0) {
      saturated += 1.0;
    } else if (v > 0.0) {
      free_sum += values[i];
      free_count += 1.0;
    }
  }
  if (shift >= 1.0) {
    saturated += static_cast<double>(pad);
  } else if (shift > 0.0) {
    free_count += static_cast<double>(pad);
  }
  if (free_count == 0.0) return shift;
  return (k - saturated - free_sum) / free_count;
}

double BisectShift(const VectorXd& values, Index pad, double k) {
  double lo = -1.0 - (values.size() > 0 ? values.maxCoeff() : 0.0);
  double hi = 1.0 - std::min(0.0, values.size() > 0 ? values.minCoeff() : 0.0);
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (FantopeSum(values, pad, mid) < k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Root of f(t) = 1 + sum_j z2_j / (delta_j - t) between the poles
// delta_lower and delta_{lower + 1} (or above delta_lower for the last root),
// inside the bracket (lo, hi). Each iteration fits the terms with poles at or
// below the root and those above it by one-pole rational models that match
// value and slope, and solves the model exactly; bisection guards the bracket.
double SecularRoot(const Eigen::Ref<const VectorXd>& delta, const double* z2,
                   Index lower, double lo, double hi) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const Index m = delta.size();
  const bool has_upper = lower + 1 < m;
  const double a = delta[lower];
  const double b = has_upper ? delta[lower + 1] : 0.0;
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double psi = 0.0, dpsi = 0.0, phi = 0.0, dphi = 0.0, magnitude = 1.0;
    for (Index j = 0; j < m; ++j) {
      const double inv = 1.0 / (delta[j] - t);
      const double term = z2[j] * inv;
      if (j <= lower) {
        psi += term;
        dpsi += term * inv;
      } else {
        phi += term;
        dphi += term * inv;
      }
      magnitude += std::abs(term);
    }
    const double f = 1.0 + psi + phi;
    if (std::abs(f) <= 4.0 * kEps * static_cast<double>(m) * magnitude) break;
    if (f < 0.0) lo = t; else hi = t;
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;

    // psi ~ c1 + q1 / (a - s), phi ~ c2 + q2 / (b - s).
    const double q1 = dpsi * (a - t) * (a - t);
    double c = 1.0 + psi - q1 / (a - t);
    double next;
    if (has_upper) {
      const double q2 = dphi * (b - t) * (b - t);
      c += phi - q2 / (b - t);
      // c (a - s)(b - s) + q1 (b - s) + q2 (a - s) = 0.
      const double qa = c;
      const double qb = -(c * (a + b) + q1 + q2);
      const double qc = c * a * b + q1 * b + q2 * a;
      next = std::numeric_limits<double>::quiet_NaN();
      if (qa == 0.0) {
        next = -qc / qb;
      } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
          const double qq = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
          const double r1 = qq / qa;
          const double r2 = qq != 0.0 ? qc / qq : r1;
          next = (r1 > lo && r1 < hi) ? r1 : r2;
        }
      }
    } else {
      c += phi;
      next = a + q1 / c;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t) break;
    t = next;
  }
  return t;
}

}  // namespace

MatrixXd EigState::Reconstruct() const {
  return basis * eigvals.asDiagonal() * basis.transpose();
}

EigState EigState::Zero(Index dim) {
  return EigState{MatrixXd(dim, 0), VectorXd(0)};
}

EigState EigState::ScaledIdentity(Index dim, double value) {
  return EigState{MatrixXd::Identity(dim, dim),
                  VectorXd::Constant(dim, value)};
}

MatrixXd Orthonormalize(const MatrixXd& v) {
  if (v.cols() > v.rows()) {
    throw RankDeficientError(v.rows(), 0.0);
  }
  MatrixXd q = v;
  for (Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      }
    }
    const double norm = q.col(j).norm();
    if (!(norm >= kRankDeficiencyTolerance)) {
      throw RankDeficientError(j, norm);
    }
    q.col(j) /= norm;
  }
  return q;
}

EigState FullSymmetricEig(const MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("symmetric eigensolver needs a square matrix, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
  if (a.size() > 0) {
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= kSymmetryTolerance)) {
      throw InvalidArgumentError("matrix is not symmetric (max asymmetry " +
                                 std::to_string(asym) + ")");
    }
  }
  const MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("symmetric eigensolver did not converge");
  }
  EigState out{solver.eigenvectors(), solver.eigenvalues()};
  SortDescending(out.basis, out.eigvals);
  return out;
}

EigState DiagonalPlusRankOneEig(const VectorXd& diag, const VectorXd& z,
                                double rho) {
  const Index n = diag.size();
  if (z.size() != n) {
    throw DimensionError("diagonal has " + std::to_string(n) +
                         " entries, update vector has " +
                         std::to_string(z.size()));
  }
  if (!(rho >= 0.0)) throw InvalidArgumentError("rho must be non-negative");
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  // All scratch lives in two buffers; this runs once per streaming step.
  std::vector<double> real(static_cast<std::size_t>(n * (n + 11)));
  std::vector<Index> index(static_cast<std::size_t>(6 * n));
  double* next_real = real.data();
  Index* next_index = index.data();
  const auto take = [&](Index count) {
    double* p = next_real;
    next_real += count;
    return p;
  };
  const auto take_index = [&](Index count) {
    Index* p = next_index;
    next_index += count;
    return p;
  };
  double* d = take(n);
  double* w = take(n);
  double* dl = take(n);
  double* z2 = take(n);
  double* zl = take(n);
  double* tau = take(n);
  double* zhat = take(n);
  double* values = take(n);
  double* rot_c = take(n);
  double* rot_s = take(n);
  Eigen::Map<VectorXd> delta(take(n), n);
  Eigen::Map<MatrixXd> v(take(n * n), n, n);
  Index* perm = take_index(n);
  Index* live = take_index(n);
  Index* origin = take_index(n);
  Index* order = take_index(n);
  Index* rot_zeroed = take_index(n);
  Index* rot_kept = take_index(n);

  // Work in ascending order of the diagonal with z scaled by sqrt(rho).
  std::iota(perm, perm + n, Index{0});
  InsertionSort(perm, n, [&](Index a, Index b) { return diag[a] < diag[b]; });
  const double root_rho = std::sqrt(rho);
  double znorm2 = 0.0;
  double dmax = 0.0;
  for (Index i = 0; i < n; ++i) {
    d[i] = diag[perm[i]];
    w[i] = root_rho * z[perm[i]];
    znorm2 += w[i] * w[i];
    dmax = std::max(dmax, std::abs(d[i]));
  }

  // Deflation: tiny z entries, and Givens rotations that merge nearly equal
  // diagonal entries into one z component.
  const double znorm = std::sqrt(znorm2);
  const double tol = 8.0 * kEps * std::max(dmax, znorm2);
  Index rotations = 0;
  Index m = 0;
  Index prev = -1;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(w[i]) * znorm <= tol) continue;
    if (prev >= 0) {
      const double r = std::sqrt(w[prev] * w[prev] + w[i] * w[i]);
      const double c = w[i] / r;
      const double s = w[prev] / r;
      if (std::abs((d[i] - d[prev]) * c * s) <= tol) {
        rot_zeroed[rotations] = prev;
        rot_kept[rotations] = i;
        rot_c[rotations] = c;
        rot_s[rotations] = s;
        ++rotations;
        const double dp = d[prev], di = d[i];
        d[prev] = c * c * dp + s * s * di;
        d[i] = s * s * dp + c * c * di;
        w[prev] = 0.0;
        w[i] = r;
        --m;  // prev was counted as live
      }
    }
    live[m++] = i;
    prev = i;
  }
  double zsum = 0.0;
  for (Index j = 0; j < m; ++j) {
    dl[j] = d[live[j]];
    zl[j] = w[live[j]];
    z2[j] = zl[j] * zl[j];
    zsum += z2[j];
  }

  // Each root is stored as an offset tau from its nearer pole, so that the
  // differences lambda_i - d_j are accurate.
  for (Index i = 0; i < m; ++i) {
    Index k = i;
    if (i + 1 < m) {
      const double mid = 0.5 * (dl[i] + dl[i + 1]);
      double f = 1.0;
      for (Index j = 0; j < m; ++j) f += z2[j] / (dl[j] - mid);
      if (f < 0.0) k = i + 1;
    }
    for (Index j = 0; j < m; ++j) delta[j] = dl[j] - dl[k];
    double lo, hi;
    if (k == i) {
      lo = 0.0;
      hi = i + 1 < m ? 0.5 * delta[i + 1] : zsum;
    } else {
      lo = 0.5 * delta[i];
      hi = 0.0;
    }
    origin[i] = k;
    tau[i] = SecularRoot(delta.head(m), z2, i, lo, hi);
  }
  // gap(i, j) = lambda_i - d_j.
  const auto gap = [&](Index i, Index j) {
    return (dl[origin[i]] - dl[j]) + tau[i];
  };

  // Recompute z from the computed roots so that the eigenvectors come out
  // numerically orthogonal.
  for (Index j = 0; j < m; ++j) {
    double prod = gap(j, j);
    for (Index i = 0; i < m; ++i) {
      if (i != j) prod *= gap(i, j) / (dl[i] - dl[j]);
    }
    zhat[j] = std::copysign(std::sqrt(std::max(prod, 0.0)), zl[j]);
  }

  v.setZero();
  Index col = 0;
  for (Index i = 0; i < m; ++i, ++col) {
    double norm2 = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double e = zhat[j] / gap(i, j);
      v(live[j], col) = e;
      norm2 += e * e;
    }
    v.col(col) *= -1.0 / std::sqrt(norm2);
    values[col] = dl[origin[i]] + tau[i];
  }
  for (Index i = 0, j = 0; i < n; ++i) {
    if (j < m && live[j] == i) {
      ++j;
      continue;
    }
    v(i, col) = 1.0;
    values[col++] = d[i];
  }
  for (Index r = rotations - 1; r >= 0; --r) {
    const Index a = rot_zeroed[r];
    const Index b = rot_kept[r];
    const double c = rot_c[r];
    const double s = rot_s[r];
    for (Index j = 0; j < n; ++j) {
      const double va = v(a, j);
      const double vb = v(b, j);
      v(a, j) = c * va + s * vb;
      v(b, j) = -s * va + c * vb;
    }
  }

  std::iota(order, order + n, Index{0});
  InsertionSort(order, n, [&](Index a, Index b) { return values[a] > values[b]; });
  EigState out{MatrixXd(n, n), VectorXd(n)};
  for (Index c = 0; c < n; ++c) {
    out.eigvals[c] = values[order[c]];
    for (Index i = 0; i < n; ++i) out.basis(perm[i], c) = v(i, order[c]);
  }
  return out;
}

namespace {

// BuildUpdateCore without the dense matrix.
UpdateCore BuildFactoredCore(const EigState& state, const VectorXd& x,
                             double eta) {
  if (!(eta >= 0.0)) {
    throw InvalidArgumentError("step size must be non-negative");
  }
  if (x.size() != state.dim()) {
    throw DimensionError("sample has dimension " + std::to_string(x.size()) +
                         ", state has " + std::to_string(state.dim()));
  }
  const Index d = state.dim();
  const Index r = state.rank();
  const MatrixXd& u = state.basis;

  UpdateCore core;
  core.eta = eta;
  VectorXd w = u.transpose() * x;
  VectorXd residual = x;
  residual.noalias() -= u * w;
  if (r > 0) {
    const VectorXd again = u.transpose() * residual;
    residual.noalias() -= u * again;
    w += again;
  }
  const double rho = residual.norm();
  core.grew = r < d && rho >= kResidualTolerance;
  const Index m = core.grew ? r + 1 : r;
  core.diag.resize(m);
  core.diag.head(r) = state.eigvals;
  core.z.resize(m);
  core.z.head(r) = w;
  if (core.grew) {
    core.diag[r] = 0.0;
    core.z[r] = rho;
    core.frame.resize(d, m);
    core.frame.leftCols(r) = u;
    core.frame.col(r) = residual / rho;
  } else {
    core.frame = u;
  }
  return core;
}

}  // namespace

UpdateCore BuildUpdateCore(const EigState& state, const VectorXd& x,
                           double eta) {
  UpdateCore core = BuildFactoredCore(state, x, eta);
  core.small = core.diag.asDiagonal();
  core.small.noalias() += eta * core.z * core.z.transpose();
  return core;
}

EigState RankOneUpdate(const EigState& state, const VectorXd& x, double eta) {
  const UpdateCore core = BuildFactoredCore(state, x, eta);
  if (eta == 0.0 || x.isZero(0.0)) return PruneSmall(state);

  EigState small = DiagonalPlusRankOneEig(core.diag, core.z, eta);
  EigState out{MatrixXd(core.frame.rows(), small.rank()),
               std::move(small.eigvals)};
  out.basis.noalias() = core.frame.lazyProduct(small.basis);
  return PruneSmall(std::move(out));
}

ProjectionResult ProjectFantope(const VectorXd& eigvals, int k, Index dim) {
  if (k <= 0) {
    throw InvalidArgumentError("target rank must be positive, got " +
                               std::to_string(k));
  }
  if (eigvals.size() > dim) {
    throw DimensionError("spectrum has " + std::to_string(eigvals.size()) +
                         " entries but dimension is " + std::to_string(dim));
  }
  if (k > dim) {
    throw InfeasibleError("trace " + std::to_string(k) +
                          " exceeds dimension " + std::to_string(dim));
  }
  const Index pad = dim - eigvals.size();
  const double target = k;
  const double tolerance = 1e-12 * std::max(1.0, target);

  ProjectionResult out;
  out.padded_count = pad;
  const bool in_box = eigvals.size() == 0 ||
                      (eigvals.minCoeff() >= 0.0 && eigvals.maxCoeff() <= 1.0);
  if (in_box && std::abs(eigvals.sum() - target) <= tolerance) {
    out.eigvals = eigvals;
    return out;
  }

  double shift = BreakpointShift(eigvals, pad, target);
  const double refined = RefineShift(eigvals, pad, target, shift);
  if (std::abs(FantopeSum(eigvals, pad, refined) - target) <=
      std::abs(FantopeSum(eigvals, pad, shift) - target)) {
    shift = refined;
  }
  if (!(std::abs(FantopeSum(eigvals, pad, shift) - target) <= tolerance)) {
    shift = BisectShift(eigvals, pad, target);
  }

  out.shift = shift;
  out.eigvals = (eigvals.array() + shift).cwiseMax(0.0).cwiseMin(1.0);
  out.padded_value = Clip01(shift);
  return out;
}

ProjectionResult ProjectCappedFantope(const VectorXd& eigvals, int k, int cap,
                                      Index dim) {
  if (cap < k) {
    throw InfeasibleError("rank cap " + std::to_string(cap) +
                          " is below target rank " + std::to_string(k));
  }
  if (cap >= dim) return ProjectFantope(eigvals, k, dim);
  if (eigvals.size() > dim) {
    throw DimensionError("spectrum has " + std::to_string(eigvals.size()) +
                         " entries but dimension is " + std::to_string(dim));
  }

  const Index r = eigvals.size();
  const Index pad = dim - r;
  std::vector<Index> order(r);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return eigvals[a] > eigvals[b];
  });

  // Walk the merged order: non-negative explicit entries, then padding zeros,
  // then negative explicit entries.
  std::vector<Index> chosen;
  Index padded_used = 0;
  Index next = 0;
  while (static_cast<Index>(chosen.size()) + padded_used < cap) {
    if (next < r && eigvals[order[next]] >= 0.0) {
      chosen.push_back(order[next++]);
    } else if (padded_used < pad) {
      ++padded_used;
    } else if (next < r) {
      chosen.push_back(order[next++]);
    } else {
      break;
    }
  }

  VectorXd support(static_cast<Index>(chosen.size()));
  for (Index i = 0; i < support.size(); ++i) support[i] = eigvals[chosen[i]];
  const ProjectionResult inner =
      ProjectFantope(support, k, support.size() + padded_used);

  ProjectionResult out;
  out.eigvals = VectorXd::Zero(r);
  for (Index i = 0; i < support.size(); ++i) {
    out.eigvals[chosen[i]] = inner.eigvals[i];
  }
  out.shift = inner.shift;
  out.padded_count = padded_used;
  out.padded_value = inner.padded_value;
  return out;
}

EigState ApplyProjection(EigState state, const ProjectionResult& proj) {
  if (proj.eigvals.size() != state.rank()) {
    throw DimensionError("projection size does not match state rank");
  }
  const Index extra = proj.padded_value > kRankTolerance ? proj.padded_count : 0;
  EigState out;
  if (extra == 0) {
    out.basis = std::move(state.basis);
    out.eigvals = proj.eigvals;
  } else {
    const Index r = state.rank();
    out.basis.resize(state.dim(), r + extra);
    out.basis.leftCols(r) = state.basis;
    out.basis.rightCols(extra) = OrthogonalComplement(state.basis, extra);
    out.eigvals.resize(r + extra);
    out.eigvals.head(r) = proj.eigvals;
    out.eigvals.tail(extra).setConstant(proj.padded_value);
  }
  SortDescending(out.basis, out.eigvals);
  return PruneSmall(std::move(out));
}

EigState PruneSmall(EigState state, double tolerance) {
  Index keep = 0;
  for (Index i = 0; i < state.rank(); ++i) keep += state.eigvals[i] > tolerance;
  if (keep == state.rank()) return state;

  EigState out{MatrixXd(state.dim(), keep), VectorXd(keep)};
  Index j = 0;
  for (Index i = 0; i < state.rank(); ++i) {
    if (state.eigvals[i] > tolerance) {
      out.basis.col(j) = state.basis.col(i);
      out.eigvals[j] = state.eigvals[i];
      ++j;
    }
  }
  return out;
}

MatrixXd OrthogonalComplement(const MatrixXd& basis, Index count) {
  const Index d = basis.rows();
  const Index r = basis.cols();
  if (count < 0 || r + count > d) {
    throw DimensionError("cannot complete a rank-" + std::to_string(r) +
                         " basis by " + std::to_string(count) +
                         " columns in dimension " + std::to_string(d));
  }
  if (r == 0) return MatrixXd::Identity(d, count);
  Eigen::HouseholderQR<MatrixXd> qr(basis);
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, r + count);
  return q.rightCols(count);
}

SubspaceState TruncateTopK(const EigState& state, int k) {
  if (k < 1) {
    throw InvalidArgumentError("target rank must be positive, got " +
                               std::to_string(k));
  }
  if (k > state.dim()) {
    throw InvalidArgumentError("target rank " + std::to_string(k) +
                               " exceeds dimension " +
                               std::to_string(state.dim()));
  }
  const Index r = state.rank();
  SubspaceState out;
  if (r >= k) {
    out.basis = state.basis.leftCols(k);
    if (r > k) {
      const double a = state.eigvals[k - 1];
      const double b = state.eigvals[k];
      out.tie = a - b <= 1e-12 * std::max(1.0, std::abs(a));
    }
  } else {
    out.basis.resize(state.dim(), k);
    out.basis.leftCols(r) = state.basis;
    out.basis.rightCols(k - r) = OrthogonalComplement(state.basis, k - r);
    out.completed = true;
  }
  return out;
}

double MaxPrincipalAngle(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("principal angles need bases of equal shape");
  }
  if (a.cols() == 0) return 0.0;
  // sin of the largest angle is the spectral norm of (I - A A^T) B.
  const MatrixXd residual = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<MatrixXd> svd(residual);
  const double sine = std::min(1.0, svd.singularValues()[0]);
  return std::asin(sine);
}

double OrthonormalityError(const MatrixXd& q) {
  if (q.cols() == 0) return 0.0;
  return (q.transpose() * q - MatrixXd::Identity(q.cols(), q.cols()))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace streampca

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

#include "streampca/solvers.h"

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "streampca/bench.h"

namespace streampca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void CheckSample(const VectorXd& x, Index dim) {
  if (x.size() != dim) {
    throw DimensionError("sample has dimension " + std::to_string(x.size()) +
                         ", solver expects " + std::to_string(dim));
  }
}

void Accumulate(MsgState& state) {
  const EigState& it = state.iterate;
  if (it.rank() > 0) {
    const MatrixXd factor = it.basis * it.eigvals.cwiseSqrt().asDiagonal();
    state.iterate_sum.selfadjointView<Eigen::Lower>().rankUpdate(factor);
  }
  ++state.steps;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kBatch:
      return "batch";
    case Method::kIncremental:
      return "incremental";
    case Method::kPower:
      return "power";
    case Method::kMsg:
      return "msg";
    case Method::kCappedMsg:
      return "capped_msg";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  for (Method m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  throw InvalidArgumentError("unknown method '" + std::string(name) +
                             "' (expected batch, incremental, power, msg or "
                             "capped_msg)");
}

bool UsesLearningRate(Method method) {
  return method == Method::kPower || method == Method::kMsg ||
         method == Method::kCappedMsg;
}

double LearningRate::At(Index t) const {
  if (kind == Kind::kConstant) return base;
  return base / std::sqrt(static_cast<double>(std::max<Index>(t, 1)));
}

void SolverConfig::Validate(Index dim) const {
  if (target_rank < 1) {
    throw InvalidArgumentError("k must be at least 1");
  }
  if (target_rank > dim) {
    throw InvalidArgumentError("k = " + std::to_string(target_rank) +
                               " exceeds dimension " + std::to_string(dim));
  }
  if (cap < target_rank) {
    throw InvalidArgumentError("cap = " + std::to_string(cap) +
                               " is below k = " + std::to_string(target_rank));
  }
  if (max_iterations < 1) {
    throw InvalidArgumentError("iteration count must be at least 1");
  }
  if (!(rate.base > 0.0) || !std::isfinite(rate.base)) {
    throw InvalidArgumentError("base learning rate must be positive");
  }
}

SvdState SvdState::Empty(Index dim) {
  return SvdState{MatrixXd(dim, 0), VectorXd(0), 0};
}

MsgState MsgState::Start(EigState initial) {
  MsgState state;
  const Index d = initial.dim();
  state.iterate = std::move(initial);
  state.iterate_sum = MatrixXd::Zero(d, d);
  return state;
}

MatrixXd MsgState::Average() const {
  if (steps < 1) throw InvalidArgumentError("no iterates to average");
  MatrixXd full = iterate_sum.selfadjointView<Eigen::Lower>();
  return full / static_cast<double>(steps);
}

EigState InitialIterate(Index dim, int k, MsgInit init) {
  if (init == MsgInit::kZero) return EigState::Zero(dim);
  return EigState::ScaledIdentity(dim, static_cast<double>(k) / dim);
}

SubspaceState BatchPca(const RowMatrix& data, int k) {
  const Index d = data.cols();
  if (data.rows() < 1) throw InvalidArgumentError("batch PCA needs data");
  if (k < 1 || k > d) {
    throw InvalidArgumentError("k = " + std::to_string(k) +
                               " is outside [1, " + std::to_string(d) + "]");
  }
  MatrixXd moment = MatrixXd::Zero(d, d);
  moment.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(),
                                                    1.0 / data.rows());
  const MatrixXd full = moment.selfadjointView<Eigen::Lower>();
  return TruncateTopK(FullSymmetricEig(full), k);
}

SvdState IncrementalSvdStep(SvdState state, const VectorXd& x, int k) {
  CheckSample(x, state.dim());
  if (k < 1) throw InvalidArgumentError("k must be at least 1");

  // Absorbing x as a new column of A = U S V^T changes A A^T by x x^T, so the
  // new U, S come from the rank-one update of the factored U S^2 U^T.
  const EigState squared{state.basis, state.singvals.array().square()};
  const UpdateCore core = BuildUpdateCore(squared, x, 1.0);
  const EigState small = DiagonalPlusRankOneEig(core.diag, core.z, 1.0);
  const Index m = small.rank();
  Index keep = 0;
  while (keep < std::min<Index>(k, m) &&
         std::sqrt(std::max(0.0, small.eigvals[keep])) > kRankTolerance) {
    ++keep;
  }
  state.basis = core.frame * small.basis.leftCols(keep);
  state.singvals = small.eigvals.head(keep).cwiseMax(0.0).cwiseSqrt();
  ++state.count;
  return state;
}

SubspaceState PowerMethodStep(SubspaceState state, const VectorXd& x,
                              double eta) {
  CheckSample(x, state.dim());
  if (!(eta >= 0.0)) throw InvalidArgumentError("step size must be >= 0");
  const VectorXd projection = state.basis.transpose() * x;
  if (eta == 0.0 || projection.isZero(0.0)) return state;
  state.basis.noalias() += eta * x * projection.transpose();
  state.basis = Orthonormalize(state.basis);
  return state;
}

MsgState MsgStep(MsgState state, const VectorXd& x, double eta, int k) {
  EigState updated = RankOneUpdate(state.iterate, x, eta);
  const ProjectionResult proj = ProjectFantope(updated.eigvals, k, updated.dim());
  state.iterate = ApplyProjection(std::move(updated), proj);
  Accumulate(state);
  return state;
}

MsgState CappedMsgStep(MsgState state, const VectorXd& x, double eta, int k,
                       int cap) {
  if (state.iterate.rank() > cap) {
    throw InvalidArgumentError("iterate rank " +
                               std::to_string(state.iterate.rank()) +
                               " exceeds cap " + std::to_string(cap));
  }
  EigState updated = RankOneUpdate(state.iterate, x, eta);
  const ProjectionResult proj =
      ProjectCappedFantope(updated.eigvals, k, cap, updated.dim());
  state.iterate = ApplyProjection(std::move(updated), proj);
  Accumulate(state);
  return state;
}

SubspaceState MsgFinalize(const MsgState& state, int k) {
  return TruncateTopK(FullSymmetricEig(state.Average()), k);
}

BatchSolver::BatchSolver(Index dim, int k)
    : k_(k), second_moment_(MatrixXd::Zero(dim, dim)) {}

void BatchSolver::Step(const VectorXd& x, double /*eta*/) {
  CheckSample(x, dim());
  second_moment_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  ++count_;
}

SubspaceState BatchSolver::Solution() const {
  if (count_ == 0) return TruncateTopK(EigState::Zero(dim()), k_);
  const MatrixXd full = second_moment_.selfadjointView<Eigen::Lower>();
  return TruncateTopK(FullSymmetricEig(full / static_cast<double>(count_)), k_);
}

IncrementalSolver::IncrementalSolver(Index dim, int k)
    : k_(k), state_(SvdState::Empty(dim)) {}

void IncrementalSolver::Step(const VectorXd& x, double /*eta*/) {
  state_ = IncrementalSvdStep(std::move(state_), x, k_);
}

SubspaceState IncrementalSolver::Solution() const {
  return TruncateTopK(EigState{state_.basis, state_.singvals}, k_);
}

Index IncrementalSolver::IterateRank() const {
  return streampca::IterateRank(state_);
}

PowerSolver::PowerSolver(Index dim, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  MatrixXd start(dim, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < dim; ++i) start(i, j) = gauss(rng);
  }
  state_.basis = Orthonormalize(start);
}

void PowerSolver::Step(const VectorXd& x, double eta) {
  state_ = PowerMethodStep(std::move(state_), x, eta);
}

Index PowerSolver::IterateRank() const {
  return streampca::IterateRank(state_);
}

MsgSolver::MsgSolver(EigState initial, int k, std::optional<int> cap)
    : k_(k), cap_(cap), state_(MsgState::Start(std::move(initial))) {
  if (cap_ && state_.iterate.rank() > *cap_) {
    throw InvalidArgumentError("initial iterate rank exceeds the cap");
  }
}

void MsgSolver::Step(const VectorXd& x, double eta) {
  if (cap_) {
    state_ = CappedMsgStep(std::move(state_), x, eta, k_, *cap_);
  } else {
    state_ = MsgStep(std::move(state_), x, eta, k_);
  }
}

SubspaceState MsgSolver::Solution() const {
  if (state_.steps == 0) return TruncateTopK(state_.iterate, k_);
  return MsgFinalize(state_, k_);
}

Index MsgSolver::IterateRank() const { return streampca::IterateRank(state_); }

std::unique_ptr<StreamingSolver> MakeSolver(Method method, Index dim,
                                            const SolverConfig& config) {
  config.Validate(dim);
  const int k = config.target_rank;
  switch (method) {
    case Method::kBatch:
      return std::make_unique<BatchSolver>(dim, k);
    case Method::kIncremental:
      return std::make_unique<IncrementalSolver>(dim, k);
    case Method::kPower:
      return std::make_unique<PowerSolver>(dim, k, config.seed);
    case Method::kMsg:
      return std::make_unique<MsgSolver>(
          InitialIterate(dim, k,
                         config.msg_init.value_or(MsgInit::kScaledIdentity)),
          k);
    case Method::kCappedMsg: {
      const MsgInit fallback =
          config.cap >= dim ? MsgInit::kScaledIdentity : MsgInit::kZero;
      return std::make_unique<MsgSolver>(
          InitialIterate(dim, k, config.msg_init.value_or(fallback)), k,
          config.cap);
    }
  }
  throw InvalidArgumentError("unknown method");
}

Index DefaultCadence(Index iterations) {
  return std::max<Index>(1, (iterations + 499) / 500);
}

RunResult RunSolver(Method method, SampleStream& stream,
                    const SolverConfig& config, const Probe& probe,
                    const RunOptions& options) {
  auto solver = MakeSolver(method, stream.dim(), config);
  return RunSolver(*solver, stream, config, probe, options);
}

RunResult RunSolver(StreamingSolver& solver, SampleStream& stream,
                    const SolverConfig& config, const Probe& probe,
                    const RunOptions& options) {
  if (stream.dim() != solver.dim()) {
    throw DimensionError("stream dimension " + std::to_string(stream.dim()) +
                         " does not match solver dimension " +
                         std::to_string(solver.dim()));
  }
  if (config.max_iterations < 1) {
    throw InvalidArgumentError("iteration count must be at least 1");
  }
  VectorXd x(stream.dim());
  VectorXd next(stream.dim());
  if (!stream.Next(x)) throw Error("sample stream is empty");

  const bool batch = solver.method() == Method::kBatch;
  const Index total = config.max_iterations;
  const Index cadence =
      options.cadence > 0 ? options.cadence : DefaultCadence(total);
  StepTimer timer;

  RunResult result;
  auto record = [&](Index t) {
    const ProbeMetrics metrics = probe ? probe(solver) : ProbeMetrics{};
    result.trajectory.records.push_back(
        {t, options.measure_time ? timer.elapsed() : 0.0, metrics.objective,
         metrics.suboptimality, solver.IterateRank()});
  };

  if (options.record_initial && !batch) record(0);
  for (Index t = 1;; ++t) {
    const double eta = config.rate.At(t);
    timer.Time([&] { solver.Step(x, eta); });
    const bool last = t >= total || !stream.Next(next);
    if (last) {
      // The batch answer costs an eigendecomposition; charge it to the run.
      if (batch) timer.Time([&] { result.solution = solver.Solution(); });
      record(t);
      break;
    }
    if (!batch && t % cadence == 0) record(t);
    std::swap(x, next);
  }
  if (!batch) result.solution = solver.Solution();
  return result;
}

}  // namespace streampca

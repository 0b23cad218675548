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

// The five PCA solvers: batch (second-moment eigendecomposition), truncated
// incremental SVD, stochastic power method, matrix stochastic gradient (MSG)
// and rank-capped MSG. Each has a functional step over its state type and a
// StreamingSolver wrapper so that RunSolver can drive them interchangeably.

#ifndef STREAMPCA_SOLVERS_H_
#define STREAMPCA_SOLVERS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "streampca/common.h"
#include "streampca/data.h"
#include "streampca/spectral.h"
#include "streampca/trajectory.h"

namespace streampca {

enum class Method { kBatch, kIncremental, kPower, kMsg, kCappedMsg };

inline constexpr Method kAllMethods[] = {Method::kBatch, Method::kIncremental,
                                         Method::kPower, Method::kMsg,
                                         Method::kCappedMsg};

std::string_view MethodName(Method method);
// Accepts the names produced by MethodName; throws InvalidArgumentError.
Method ParseMethod(std::string_view name);
// Whether the method consumes a learning rate.
bool UsesLearningRate(Method method);

struct LearningRate {
  enum class Kind { kInverseSqrt, kConstant };

  Kind kind = Kind::kInverseSqrt;
  double base = 1.0;

  // Step size for the t-th sample, t >= 1.
  double At(Index t) const;
};

enum class MsgInit {
  // (k/d) * I, the centre of the Fantope.
  kScaledIdentity,
  // The zero matrix (rank 0); the first projection restores trace k.
  kZero,
};

struct SolverConfig {
  int target_rank = 4;
  // Rank cap for capped MSG.
  int cap = 5;
  LearningRate rate;
  Index max_iterations = 1;
  std::uint64_t seed = 42;
  // Unset: (k/d) I for MSG, and for capped MSG whenever cap >= d; otherwise
  // the zero matrix.
  std::optional<MsgInit> msg_init;

  // Throws InvalidArgumentError / InfeasibleError.
  void Validate(Index dim) const;
};

// Truncated SVD U diag(S) of the samples absorbed so far (as columns).
struct SvdState {
  Eigen::MatrixXd basis;
  Eigen::VectorXd singvals;
  Index count = 0;

  Index dim() const { return basis.rows(); }
  Index rank() const { return singvals.size(); }

  static SvdState Empty(Index dim);
};

struct MsgState {
  EigState iterate;
  // Sum of the post-step iterates M^(1) + ... + M^(steps), lower triangle
  // only.
  Eigen::MatrixXd iterate_sum;
  Index steps = 0;

  static MsgState Start(EigState initial);
  // Dense mean of the post-step iterates; requires steps >= 1.
  Eigen::MatrixXd Average() const;
};

EigState InitialIterate(Index dim, int k, MsgInit init);

// Top-k eigenvectors of the second moment (1/n) X^T X.
SubspaceState BatchPca(const RowMatrix& data, int k);

// Absorbs x into the factorization and truncates to rank <= k. O(k^2 d).
SvdState IncrementalSvdStep(SvdState state, const Eigen::VectorXd& x, int k);

// U <- orthonormalize(U + eta x (x^T U)). Throws RankDeficientError if the
// update collapses the basis.
SubspaceState PowerMethodStep(SubspaceState state, const Eigen::VectorXd& x,
                              double eta);

// M <- P(M + eta x x^T), with P the Fantope projection of the spectrum.
MsgState MsgStep(MsgState state, const Eigen::VectorXd& x, double eta, int k);

// As MsgStep with the projection restricted to rank <= cap.
MsgState CappedMsgStep(MsgState state, const Eigen::VectorXd& x, double eta,
                       int k, int cap);

// Top-k eigenvectors of the averaged iterate.
SubspaceState MsgFinalize(const MsgState& state, int k);

// Uniform step/solution interface over the five methods.
class StreamingSolver {
 public:
  virtual ~StreamingSolver() = default;

  virtual Method method() const = 0;
  virtual Index dim() const = 0;
  virtual void Step(const Eigen::VectorXd& x, double eta) = 0;
  // Current rank-k answer.
  virtual SubspaceState Solution() const = 0;
  virtual Index IterateRank() const = 0;
};

class BatchSolver : public StreamingSolver {
 public:
  BatchSolver(Index dim, int k);

  Method method() const override { return Method::kBatch; }
  Index dim() const override { return second_moment_.rows(); }
  void Step(const Eigen::VectorXd& x, double eta) override;
  SubspaceState Solution() const override;
  Index IterateRank() const override { return dim(); }

 private:
  int k_;
  Eigen::MatrixXd second_moment_;  // lower triangle of sum x x^T
  Index count_ = 0;
};

class IncrementalSolver : public StreamingSolver {
 public:
  IncrementalSolver(Index dim, int k);

  Method method() const override { return Method::kIncremental; }
  Index dim() const override { return state_.dim(); }
  void Step(const Eigen::VectorXd& x, double eta) override;
  SubspaceState Solution() const override;
  Index IterateRank() const override;

  const SvdState& state() const { return state_; }

 private:
  int k_;
  SvdState state_;
};

class PowerSolver : public StreamingSolver {
 public:
  // Starts from an orthonormalized Gaussian d x k matrix drawn from `seed`.
  PowerSolver(Index dim, int k, std::uint64_t seed);

  Method method() const override { return Method::kPower; }
  Index dim() const override { return state_.dim(); }
  void Step(const Eigen::VectorXd& x, double eta) override;
  SubspaceState Solution() const override { return state_; }
  Index IterateRank() const override;

  const SubspaceState& state() const { return state_; }

 private:
  SubspaceState state_;
};

// MSG, or capped MSG when constructed with a cap.
class MsgSolver : public StreamingSolver {
 public:
  MsgSolver(EigState initial, int k, std::optional<int> cap = std::nullopt);

  Method method() const override {
    return cap_ ? Method::kCappedMsg : Method::kMsg;
  }
  Index dim() const override { return state_.iterate.dim(); }
  void Step(const Eigen::VectorXd& x, double eta) override;
  // MsgFinalize after at least one step, the truncated initial iterate before.
  SubspaceState Solution() const override;
  Index IterateRank() const override;

  const MsgState& state() const { return state_; }

 private:
  int k_;
  std::optional<int> cap_;
  MsgState state_;
};

std::unique_ptr<StreamingSolver> MakeSolver(Method method, Index dim,
                                            const SolverConfig& config);

struct ProbeMetrics {
  double objective = 0.0;
  double suboptimality = 0.0;
};

// Evaluates the solver's current state; called at the probe cadence.
using Probe = std::function<ProbeMetrics(const StreamingSolver&)>;

struct RunOptions {
  // Probe every `cadence` steps and after the last one; 0 means ceil(T/500).
  Index cadence = 0;
  // Also record the state before the first sample (iteration 0). Ignored for
  // the batch method, which has no iterate before seeing data.
  bool record_initial = false;
  // When false every record reports elapsed = 0, making runs byte-stable.
  bool measure_time = true;
};

Index DefaultCadence(Index iterations);

struct RunResult {
  SubspaceState solution;
  Trajectory trajectory;
};

// Feeds up to config.max_iterations samples from `stream` through `method`.
// The batch method is probed once, after all samples. Throws Error if the
// stream yields no sample.
RunResult RunSolver(Method method, SampleStream& stream,
                    const SolverConfig& config, const Probe& probe,
                    const RunOptions& options = {});

// Same, driving an existing solver.
RunResult RunSolver(StreamingSolver& solver, SampleStream& stream,
                    const SolverConfig& config, const Probe& probe,
                    const RunOptions& options = {});

}  // namespace streampca

#endif  // STREAMPCA_SOLVERS_H_

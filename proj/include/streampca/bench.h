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

// Metrics, timing and trajectory recording, plus the experiment protocol
// (split, standardize on train, tune the step size, run, evaluate on test).

#ifndef STREAMPCA_BENCH_H_
#define STREAMPCA_BENCH_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streampca/common.h"
#include "streampca/data.h"
#include "streampca/solvers.h"
#include "streampca/spectral.h"
#include "streampca/trajectory.h"

namespace streampca {

// (1/n) sum_t ||U^T x_t||^2 = trace(U^T M U) for the data's second moment M.
double Objective(const Eigen::MatrixXd& basis, const RowMatrix& data);
double Objective(const SubspaceState& subspace, const Dataset& data);

// Batch optimum on the evaluation set.
struct ReferenceOptimum {
  double value = 0.0;
  SubspaceState basis;
};

ReferenceOptimum ComputeReference(const Dataset& eval, int k);

// ref.value - Objective(U, data).
double Suboptimality(const SubspaceState& subspace,
                     const ReferenceOptimum& ref, const Dataset& data);

Index IterateRank(const MsgState& state);
Index IterateRank(const SvdState& state);
Index IterateRank(const SubspaceState& state);

// Probe reporting objective and suboptimality of the solver's current
// solution on `eval`. Both arguments must outlive the probe.
Probe MakeSuboptimalityProbe(const Dataset& eval, const ReferenceOptimum& ref);

// Accumulates wall time spent inside the timed calls only.
class StepTimer {
 public:
  using Clock = std::chrono::steady_clock;

  template <typename F>
  void Time(F&& f) {
    const Clock::time_point start = Clock::now();
    f();
    total_ += Clock::now() - start;
  }

  double elapsed() const {
    return std::chrono::duration<double>(total_).count();
  }

 private:
  Clock::duration total_{};
};

struct MethodTrajectory {
  std::string method;
  Trajectory trajectory;

  bool operator==(const MethodTrajectory&) const = default;
};

inline constexpr char kTrajectoryHeader[] =
    "method,iteration,elapsed_s,objective,suboptimality,rank";

// One header line, then one row per record, blocks in the given order.
void WriteTrajectoryCsv(std::ostream& out,
                        std::span<const MethodTrajectory> runs);
std::string TrajectoryCsv(std::span<const MethodTrajectory> runs);
// Consecutive rows with the same method form one block.
std::vector<MethodTrajectory> ReadTrajectoryCsv(std::istream& in);

// Powers of two 2^-6 .. 2^2.
std::vector<double> DefaultRateGrid();

struct PreparedData {
  Split split;
  Standardizer standardizer;
};

// Splits raw data and standardizes all three parts with statistics fitted on
// the training part.
PreparedData PrepareExperiment(const Dataset& raw,
                               const std::array<double, 3>& fractions,
                               std::uint64_t seed);

struct TuningResult {
  double rate = 0.0;
  // (base rate, tuning-split objective) for every grid point tried.
  std::vector<std::pair<double, double>> scores;
};

// Runs the method on `train` for each base rate in `grid` and keeps the one
// with the largest objective on `tune`; earlier grid entries win ties.
TuningResult TuneLearningRate(Method method, const Dataset& train,
                              const Dataset& tune, SolverConfig config,
                              std::span<const double> grid);

struct ProtocolRun {
  Method method;
  // Base learning rate used for the final run (unused by batch/incremental).
  double rate = 0.0;
  std::optional<TuningResult> tuning;
  ReferenceOptimum reference;
  RunResult result;
};

// Tunes (unless `fixed_rate` is given or the method has no step size), then
// runs on the training split with suboptimality probed on the test split
// against the batch optimum of the test split.
ProtocolRun RunProtocol(Method method, const PreparedData& data,
                        SolverConfig config, std::optional<double> fixed_rate,
                        std::span<const double> grid,
                        const RunOptions& options);

}  // namespace streampca

#endif  // STREAMPCA_BENCH_H_

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

#include "streampca/bench.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace streampca {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::RandomMatrix;

Dataset FromRows(const RowMatrix& rows) {
  Dataset out;
  out.rows = rows;
  return out;
}

PreparedData SmallExperiment(std::uint64_t seed) {
  const Dataset raw =
      GenerateOrthogonal(2000, 10, GeometricSpectrum(10, 0.7), 1.0, seed);
  return PrepareExperiment(raw, kDefaultSplit, seed);
}

TEST(ObjectiveTest, HandComputed) {
  RowMatrix rows(2, 3);
  rows << 1, 0, 0, 0, 1, 0;
  EXPECT_DOUBLE_EQ(Objective(VectorXd::Unit(3, 0), rows), 0.5);
}

TEST(ObjectiveTest, FullBasisCapturesEverything) {
  std::mt19937_64 rng(41);
  const RowMatrix rows = RandomMatrix(30, 4, rng);
  const double mean_norm = rows.rowwise().squaredNorm().mean();
  EXPECT_NEAR(Objective(Orthonormalize(RandomMatrix(4, 4, rng)), rows),
              mean_norm, 1e-12);
}

TEST(ObjectiveTest, MatchesDenseTrace) {
  std::mt19937_64 rng(42);
  const RowMatrix rows = RandomMatrix(40, 6, rng);
  const MatrixXd basis = Orthonormalize(RandomMatrix(6, 2, rng));
  const MatrixXd moment = rows.transpose() * rows / 40.0;
  EXPECT_NEAR(Objective(basis, rows),
              (basis.transpose() * moment * basis).trace(), 1e-12);
  EXPECT_THROW(Objective(MatrixXd::Identity(5, 1), rows), DimensionError);
  EXPECT_THROW(Objective(basis, RowMatrix(0, 6)), InvalidArgumentError);
}

TEST(ReferenceTest, ValueIsObjectiveOfBasis) {
  std::mt19937_64 rng(43);
  const Dataset eval = FromRows(RandomMatrix(50, 6, rng));
  const ReferenceOptimum ref = ComputeReference(eval, 3);
  EXPECT_NEAR(ref.value, Objective(ref.basis, eval), 1e-12);
  EXPECT_EQ(ref.basis.rank(), 3);
}

TEST(SuboptimalityTest, Examples) {
  // Second moment of rank 2, spanned by e1 and e2.
  RowMatrix rows(4, 4);
  rows << 2, 0, 0, 0, -2, 0, 0, 0, 0, 1, 0, 0, 0, -1, 0, 0;
  const Dataset eval = FromRows(rows);
  const ReferenceOptimum ref = ComputeReference(eval, 2);
  EXPECT_NEAR(Suboptimality(ref.basis, ref, eval), 0.0, 1e-15);

  SubspaceState orthogonal{MatrixXd::Zero(4, 2)};
  orthogonal.basis(2, 0) = 1.0;
  orthogonal.basis(3, 1) = 1.0;
  EXPECT_NEAR(Suboptimality(orthogonal, ref, eval), ref.value, 1e-15);
  EXPECT_NEAR(ref.value, 2.5, 1e-12);

  std::mt19937_64 rng(44);
  const SubspaceState random{Orthonormalize(RandomMatrix(4, 2, rng))};
  EXPECT_NEAR(Suboptimality(random, ref, eval),
              Objective(ref.basis, eval) - Objective(random, eval), 1e-15);
  EXPECT_THROW(Suboptimality(SubspaceState{MatrixXd::Identity(3, 2)}, ref, eval),
               DimensionError);
}

TEST(SuboptimalityTest, NonNegativeForRandomSubspaces) {
  std::mt19937_64 rng(45);
  const Dataset eval = FromRows(RandomMatrix(80, 7, rng));
  for (int k = 1; k <= 7; ++k) {
    const ReferenceOptimum ref = ComputeReference(eval, k);
    for (int trial = 0; trial < 20; ++trial) {
      const SubspaceState u{Orthonormalize(RandomMatrix(7, k, rng))};
      EXPECT_GE(Suboptimality(u, ref, eval), -1e-9);
    }
  }
}

TEST(IterateRankTest, FreshCappedStartIsRankZero) {
  SolverConfig config;
  config.target_rank = 4;
  config.cap = 5;
  const auto solver = MakeSolver(Method::kCappedMsg, 32, config);
  EXPECT_EQ(solver->IterateRank(), 0);
  EXPECT_EQ(IterateRank(MsgState::Start(InitialIterate(32, 4, MsgInit::kZero))),
            0);
}

TEST(IterateRankTest, PowerIsAlwaysKAndBatchIsD) {
  std::mt19937_64 rng(46);
  SolverConfig config;
  config.target_rank = 3;
  const auto power = MakeSolver(Method::kPower, 9, config);
  const auto batch = MakeSolver(Method::kBatch, 9, config);
  EXPECT_EQ(power->IterateRank(), 3);
  for (int t = 1; t <= 20; ++t) {
    const VectorXd x = testing::RandomVector(9, rng);
    power->Step(x, 0.1 / std::sqrt(t));
    batch->Step(x, 0.0);
    EXPECT_EQ(power->IterateRank(), 3);
  }
  EXPECT_EQ(batch->IterateRank(), 9);
  EXPECT_EQ(IterateRank(SubspaceState{MatrixXd::Identity(9, 3)}), 3);
}

TEST(IterateRankTest, MsgMatchesDenseEigenvalueCount) {
  const Index d = 32;
  const Dataset data =
      GenerateOrthogonal(100, d, GeometricSpectrum(d, 0.8), 1.0, 47);
  MsgState state = MsgState::Start(InitialIterate(d, 4, MsgInit::kScaledIdentity));
  for (Index t = 0; t < 100; ++t) {
    state = MsgStep(std::move(state), data.rows.row(t).transpose(),
                    0.05 / std::sqrt(t + 1.0), 4);
  }
  const VectorXd dense = testing::DenseEigenvalues(state.iterate.Reconstruct());
  EXPECT_EQ(IterateRank(state), (dense.array() > kRankTolerance).count());
}

TEST(IterateRankTest, IncrementalCountsSingularValues) {
  SvdState state = SvdState::Empty(5);
  EXPECT_EQ(IterateRank(state), 0);
  state = IncrementalSvdStep(std::move(state), VectorXd::Unit(5, 1), 3);
  state = IncrementalSvdStep(std::move(state), VectorXd::Unit(5, 3), 3);
  EXPECT_EQ(IterateRank(state), 2);
}

TEST(StepTimerTest, ZeroStepsIsZeroAndTimeAccumulates) {
  StepTimer timer;
  EXPECT_EQ(timer.elapsed(), 0.0);
  volatile double sink = 0.0;
  timer.Time([&] {
    for (int i = 0; i < 100000; ++i) sink = sink + std::sqrt(i);
  });
  const double first = timer.elapsed();
  EXPECT_GT(first, 0.0);
  timer.Time([] {});
  EXPECT_GE(timer.elapsed(), first);
}

TEST(TrajectoryCsvTest, RoundTripIsLossless) {
  std::vector<MethodTrajectory> runs(2);
  runs[0].method = "msg";
  runs[1].method = "power";
  std::mt19937_64 rng(48);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (MethodTrajectory& run : runs) {
    for (Index i = 0; i < 5; ++i) {
      run.trajectory.records.push_back(TrajectoryRecord{
          i * 7, 1e-7 * i + unit(rng) * 1e-9, unit(rng) / 3.0,
          unit(rng) * std::numeric_limits<double>::epsilon(), i % 3});
    }
  }
  runs[0].trajectory.records[1].objective = 0.1 + 0.2;
  const std::string text = TrajectoryCsv(runs);
  EXPECT_EQ(text.substr(0, text.find('\n')), kTrajectoryHeader);
  std::istringstream in(text);
  EXPECT_EQ(ReadTrajectoryCsv(in), runs);
}

TEST(TrajectoryCsvTest, RejectsMalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(ReadTrajectoryCsv(empty), ParseError);
  std::istringstream header("method,iteration\n");
  EXPECT_THROW(ReadTrajectoryCsv(header), ParseError);
  std::istringstream short_row(std::string(kTrajectoryHeader) + "\nmsg,1,0,1\n");
  try {
    ReadTrajectoryCsv(short_row);
    FAIL() << "short row accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2);
  }
  std::istringstream bad_count(std::string(kTrajectoryHeader) +
                               "\nmsg,1.5,0,1,0,2\n");
  EXPECT_THROW(ReadTrajectoryCsv(bad_count), ParseError);
}

TEST(RateGridTest, PowersOfTwo) {
  const std::vector<double> grid = DefaultRateGrid();
  ASSERT_EQ(grid.size(), 9u);
  EXPECT_EQ(grid.front(), 1.0 / 64.0);
  EXPECT_EQ(grid.back(), 4.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    EXPECT_EQ(grid[i], 2.0 * grid[i - 1]);
  }
}

TEST(PrepareExperimentTest, TransformFittedOnTrainOnly) {
  const Dataset raw =
      GenerateOrthogonal(400, 5, GeometricSpectrum(5, 0.7), 3.0, 49);
  const PreparedData prepared = PrepareExperiment(raw, kDefaultSplit, 49);
  const Split split = SplitDataset(raw, kDefaultSplit, 49);
  const Standardizer fit = Standardizer::Fit(split.train);
  EXPECT_LE((prepared.split.test.rows - fit.Apply(split.test).rows)
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
  const VectorXd train_mean = prepared.split.train.rows.colwise().mean();
  EXPECT_LE(train_mean.cwiseAbs().maxCoeff(), 1e-10);
  const VectorXd test_mean = prepared.split.test.rows.colwise().mean();
  EXPECT_GT(test_mean.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(TuneLearningRateTest, PicksBestTuningObjective) {
  const PreparedData data = SmallExperiment(50);
  SolverConfig config;
  config.target_rank = 3;
  config.max_iterations = data.split.train.size();
  const std::vector<double> grid = DefaultRateGrid();
  const TuningResult tuned = TuneLearningRate(
      Method::kMsg, data.split.train, data.split.tune, config, grid);
  ASSERT_EQ(tuned.scores.size(), grid.size());
  double best = -1.0;
  for (const auto& [rate, score] : tuned.scores) {
    if (score > best) best = score;
  }
  for (const auto& [rate, score] : tuned.scores) {
    if (rate == tuned.rate) EXPECT_EQ(score, best);
  }
  // Re-running the chosen rate reproduces its score.
  config.rate.base = tuned.rate;
  DatasetStream stream(data.split.train.rows);
  const RunResult rerun = RunSolver(Method::kMsg, stream, config, nullptr);
  EXPECT_DOUBLE_EQ(Objective(rerun.solution, data.split.tune), best);
  EXPECT_THROW(TuneLearningRate(Method::kMsg, data.split.train,
                                data.split.tune, config, {}),
               InvalidArgumentError);
}

TEST(RunProtocolTest, RecordsAreConsistent) {
  const PreparedData data = SmallExperiment(51);
  SolverConfig config;
  config.target_rank = 3;
  config.cap = 4;
  config.max_iterations = data.split.train.size();
  RunOptions options;
  options.cadence = 100;
  options.record_initial = true;
  const Index steps = config.max_iterations;
  for (Method method : kAllMethods) {
    const ProtocolRun run = RunProtocol(method, data, config, std::nullopt,
                                        DefaultRateGrid(), options);
    const auto& records = run.result.trajectory.records;
    if (method == Method::kBatch) {
      ASSERT_EQ(records.size(), 1u);
      EXPECT_FALSE(run.tuning.has_value());
    } else {
      EXPECT_EQ(static_cast<Index>(records.size()),
                (steps + options.cadence - 1) / options.cadence + 1);
      EXPECT_EQ(run.tuning.has_value(), UsesLearningRate(method));
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      EXPECT_GE(records[i].suboptimality, -1e-9) << MethodName(method);
      EXPECT_NEAR(records[i].objective + records[i].suboptimality,
                  run.reference.value, 1e-12);
      if (i > 0) {
        EXPECT_GT(records[i].iteration, records[i - 1].iteration);
        EXPECT_GE(records[i].elapsed, records[i - 1].elapsed);
      }
    }
    EXPECT_EQ(records.back().iteration, steps);
    if (method != Method::kBatch) {
      EXPECT_LE(records.back().suboptimality, records.front().suboptimality)
          << MethodName(method);
    }
  }
}

TEST(RunProtocolTest, FixedRateSkipsTuning) {
  const PreparedData data = SmallExperiment(52);
  SolverConfig config;
  config.target_rank = 2;
  config.max_iterations = 50;
  const ProtocolRun run =
      RunProtocol(Method::kPower, data, config, 0.25, DefaultRateGrid(), {});
  EXPECT_FALSE(run.tuning.has_value());
  EXPECT_EQ(run.rate, 0.25);
  config.target_rank = 11;
  EXPECT_THROW(
      RunProtocol(Method::kMsg, data, config, 0.25, DefaultRateGrid(), {}),
      InvalidArgumentError);
}

}  // namespace
}  // namespace streampca

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

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "streampca/format.h"

namespace streampca {

namespace {

Index ParseCount(std::string_view cell, Index row, Index column) {
  Index value = 0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("not an integer: '" + std::string(cell) + "'", row,
                     column);
  }
  return value;
}

}  // namespace

double Objective(const Eigen::MatrixXd& basis, const RowMatrix& data) {
  if (basis.rows() != data.cols()) {
    throw DimensionError("basis has dimension " +
                         std::to_string(basis.rows()) + ", data has " +
                         std::to_string(data.cols()));
  }
  if (data.rows() == 0) throw InvalidArgumentError("objective needs data");
  return (data * basis).squaredNorm() / static_cast<double>(data.rows());
}

double Objective(const SubspaceState& subspace, const Dataset& data) {
  return Objective(subspace.basis, data.rows);
}

ReferenceOptimum ComputeReference(const Dataset& eval, int k) {
  ReferenceOptimum ref;
  ref.basis = BatchPca(eval.rows, k);
  ref.value = Objective(ref.basis, eval);
  return ref;
}

double Suboptimality(const SubspaceState& subspace,
                     const ReferenceOptimum& ref, const Dataset& data) {
  if (ref.basis.dim() != subspace.dim()) {
    throw DimensionError("reference and candidate dimensions differ");
  }
  return ref.value - Objective(subspace, data);
}

Index IterateRank(const MsgState& state) {
  return (state.iterate.eigvals.array() > kRankTolerance).count();
}

Index IterateRank(const SvdState& state) {
  return (state.singvals.array() > kRankTolerance).count();
}

Index IterateRank(const SubspaceState& state) { return state.rank(); }

Probe MakeSuboptimalityProbe(const Dataset& eval, const ReferenceOptimum& ref) {
  return [&eval, &ref](const StreamingSolver& solver) {
    const SubspaceState solution = solver.Solution();
    const double objective = Objective(solution, eval);
    return ProbeMetrics{objective, ref.value - objective};
  };
}

void WriteTrajectoryCsv(std::ostream& out,
                        std::span<const MethodTrajectory> runs) {
  out << kTrajectoryHeader << '\n';
  for (const MethodTrajectory& run : runs) {
    for (const TrajectoryRecord& r : run.trajectory.records) {
      out << run.method << ',' << r.iteration << ',' << FormatDouble(r.elapsed)
          << ',' << FormatDouble(r.objective) << ','
          << FormatDouble(r.suboptimality) << ',' << r.rank << '\n';
    }
  }
}

std::string TrajectoryCsv(std::span<const MethodTrajectory> runs) {
  std::ostringstream out;
  WriteTrajectoryCsv(out, runs);
  return out.str();
}

std::vector<MethodTrajectory> ReadTrajectoryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory CSV", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) {
    throw ParseError("unexpected trajectory header", 1, 1);
  }
  std::vector<MethodTrajectory> runs;
  Index row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != 6) {
      throw ParseError("expected 6 columns", row,
                       static_cast<Index>(std::min<std::size_t>(cells.size(), 6)) + 1);
    }
    TrajectoryRecord r;
    r.iteration = ParseCount(cells[1], row, 2);
    r.elapsed = ParseDouble(cells[2], row, 3);
    r.objective = ParseDouble(cells[3], row, 4);
    r.suboptimality = ParseDouble(cells[4], row, 5);
    r.rank = ParseCount(cells[5], row, 6);
    if (runs.empty() || runs.back().method != cells[0]) {
      runs.push_back(MethodTrajectory{std::string(cells[0]), {}});
    }
    runs.back().trajectory.records.push_back(r);
  }
  return runs;
}

std::vector<double> DefaultRateGrid() {
  std::vector<double> grid;
  for (int e = -6; e <= 2; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

PreparedData PrepareExperiment(const Dataset& raw,
                               const std::array<double, 3>& fractions,
                               std::uint64_t seed) {
  const Split split = SplitDataset(raw, fractions, seed);
  PreparedData out;
  out.standardizer = Standardizer::Fit(split.train);
  out.split.fractions = split.fractions;
  out.split.train = out.standardizer.Apply(split.train);
  out.split.tune = out.standardizer.Apply(split.tune);
  out.split.test = out.standardizer.Apply(split.test);
  return out;
}

TuningResult TuneLearningRate(Method method, const Dataset& train,
                              const Dataset& tune, SolverConfig config,
                              std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgumentError("empty learning-rate grid");
  TuningResult out;
  double best = -std::numeric_limits<double>::infinity();
  out.rate = grid.front();
  RunOptions options;
  options.cadence = config.max_iterations;
  options.measure_time = false;
  for (double rate : grid) {
    config.rate.base = rate;
    double score = -std::numeric_limits<double>::infinity();
    try {
      DatasetStream stream(train.rows);
      const RunResult run = RunSolver(method, stream, config, nullptr, options);
      score = Objective(run.solution, tune);
    } catch (const RankDeficientError&) {
      // The step size collapsed the basis; this grid point loses.
    }
    out.scores.emplace_back(rate, score);
    if (score > best) {
      best = score;
      out.rate = rate;
    }
  }
  return out;
}

ProtocolRun RunProtocol(Method method, const PreparedData& data,
                        SolverConfig config, std::optional<double> fixed_rate,
                        std::span<const double> grid,
                        const RunOptions& options) {
  const Split& split = data.split;
  config.Validate(split.train.dim());
  ProtocolRun out;
  out.method = method;
  if (UsesLearningRate(method)) {
    if (fixed_rate) {
      config.rate.base = *fixed_rate;
    } else {
      out.tuning = TuneLearningRate(method, split.train, split.tune, config, grid);
      config.rate.base = out.tuning->rate;
    }
    out.rate = config.rate.base;
  }
  out.reference = ComputeReference(split.test, config.target_rank);
  DatasetStream stream(split.train.rows);
  out.result = RunSolver(method, stream, config,
                         MakeSuboptimalityProbe(split.test, out.reference),
                         options);
  return out;
}

}  // namespace streampca

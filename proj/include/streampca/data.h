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

// Synthetic data generation, CSV ingestion, standardization, splitting and
// the sample stream consumed by the solvers.

#ifndef STREAMPCA_DATA_H_
#define STREAMPCA_DATA_H_

#include <array>
#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

#include "streampca/common.h"

namespace streampca {

enum class Provenance { kSynthetic, kFile };

struct Dataset {
  RowMatrix rows;
  Provenance provenance = Provenance::kFile;
  // Synthetic only: mixing probabilities p_1..p_d and the orthonormal
  // directions (columns) they weight. Empty for file data.
  Eigen::VectorXd spectrum;
  Eigen::MatrixXd basis;

  Index size() const { return rows.rows(); }
  Index dim() const { return rows.cols(); }
};

// p_i proportional to decay^i, i = 0..d-1, normalized to sum to one.
Eigen::VectorXd GeometricSpectrum(Index d, double decay);

// Draws n samples s * scale * sqrt(d) * v_i, where {v_i} is a seeded
// random orthonormal basis, i ~ spectrum and s = +-1 uniformly. The population
// second moment is scale^2 * d * V diag(p) V^T.
Dataset GenerateOrthogonal(Index n, Index d, const Eigen::VectorXd& spectrum,
                           double scale, std::uint64_t seed);

// Column-wise affine standardization. Uses the population standard deviation;
// zero-variance columns are divided by one.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer Fit(const Dataset& data);
  Dataset Apply(const Dataset& data) const;
};

struct Normalized {
  Dataset data;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

Normalized Normalize(const Dataset& data);

struct Split {
  Dataset train;
  Dataset tune;
  Dataset test;
  std::array<double, 3> fractions{};
};

inline constexpr std::array<double, 3> kDefaultSplit = {0.7, 0.15, 0.15};

// Seeded row permutation followed by a contiguous cut. Part sizes are
// round(n * f_train), round(n * f_tune) and the remainder.
Split SplitDataset(const Dataset& data, const std::array<double, 3>& fractions,
                   std::uint64_t seed);

enum class CsvHeader { kAbsent, kPresent, kAuto };

// Comma-separated numbers, one sample per row. With kAuto a first line whose
// first cell is not a number is treated as a header.
Dataset LoadCsv(const std::filesystem::path& path,
                CsvHeader header = CsvHeader::kAuto);

// Values are written in shortest round-trip form, so LoadCsv(SaveCsv(x)) == x.
void SaveCsv(const Dataset& data, const std::filesystem::path& path,
             bool header = true);

// Source of samples for the streaming solvers.
class SampleStream {
 public:
  virtual ~SampleStream() = default;

  virtual Index dim() const = 0;
  // Writes the next sample into `x`; false when the stream is exhausted.
  virtual bool Next(Eigen::VectorXd& x) = 0;
};

// Streams the rows of a matrix in order. With `cycle` the stream restarts at
// the first row after the last one (never exhausts unless empty).
class DatasetStream : public SampleStream {
 public:
  explicit DatasetStream(const RowMatrix& rows, bool cycle = true)
      : rows_(rows), cycle_(cycle) {}

  Index dim() const override { return rows_.cols(); }
  bool Next(Eigen::VectorXd& x) override;

 private:
  const RowMatrix& rows_;
  bool cycle_;
  Index position_ = 0;
};

}  // namespace streampca

#endif  // STREAMPCA_DATA_H_

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

#ifndef STREAMPCA_COMMON_H_
#define STREAMPCA_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace streampca {

using Index = Eigen::Index;

// Samples are stored one per row so that streaming a row is contiguous.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Eigenvalues at or below this are treated as zero and dropped from factored
// states.
inline constexpr double kRankTolerance = 1e-12;

// Residual norm below which a rank-one update stays inside the current span.
inline constexpr double kResidualTolerance = 1e-10;

// Column residual norm below which orthonormalization reports rank deficiency.
inline constexpr double kRankDeficiencyTolerance = 1e-12;

// Maximum absolute asymmetry accepted by the symmetric eigensolver.
inline constexpr double kSymmetryTolerance = 1e-10;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// The constraint set is empty for the requested parameters (e.g. k > d).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(Index column, double residual_norm);

  // Zero-based index of the first column found to be linearly dependent.
  Index column() const { return column_; }
  double residual_norm() const { return residual_norm_; }

 private:
  Index column_;
  double residual_norm_;
};

class ParseError : public Error {
 public:
  // `row` and `column` are 1-based positions in the source text.
  ParseError(const std::string& what, Index row, Index column);

  Index row() const { return row_; }
  Index column() const { return column_; }

 private:
  Index row_;
  Index column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace streampca

#endif  // STREAMPCA_COMMON_H_

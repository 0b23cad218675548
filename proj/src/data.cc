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

#include "streampca/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "streampca/format.h"
#include "streampca/spectral.h"

namespace streampca {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Dataset TakeRows(const Dataset& data, const std::vector<Index>& order,
                 Index begin, Index end) {
  Dataset out;
  out.provenance = data.provenance;
  out.spectrum = data.spectrum;
  out.basis = data.basis;
  out.rows.resize(end - begin, data.dim());
  for (Index i = begin; i < end; ++i) {
    out.rows.row(i - begin) = data.rows.row(order[i]);
  }
  return out;
}

}  // namespace

VectorXd GeometricSpectrum(Index d, double decay) {
  if (d < 1) throw InvalidArgumentError("dimension must be at least 1");
  if (!(decay > 0.0) || !std::isfinite(decay)) {
    throw InvalidArgumentError("spectrum decay must be positive");
  }
  VectorXd p(d);
  double weight = 1.0;
  for (Index i = 0; i < d; ++i) {
    p[i] = weight;
    weight *= decay;
  }
  return p / p.sum();
}

Dataset GenerateOrthogonal(Index n, Index d, const VectorXd& spectrum,
                           double scale, std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw InvalidArgumentError("need at least one sample and one dimension");
  }
  if (spectrum.size() != d) {
    throw InvalidArgumentError("spectrum has " +
                               std::to_string(spectrum.size()) +
                               " entries, expected " + std::to_string(d));
  }
  if (!spectrum.allFinite() || spectrum.minCoeff() < 0.0 ||
      std::abs(spectrum.sum() - 1.0) > 1e-12) {
    throw InvalidArgumentError(
        "spectrum must be non-negative and sum to one");
  }
  if (!std::isfinite(scale)) throw InvalidArgumentError("scale must be finite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  MatrixXd raw(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) raw(i, j) = gauss(rng);
  }

  Dataset out;
  out.provenance = Provenance::kSynthetic;
  out.spectrum = spectrum;
  out.basis = Orthonormalize(raw);
  out.rows.resize(n, d);

  std::discrete_distribution<Index> pick(spectrum.data(),
                                         spectrum.data() + d);
  std::bernoulli_distribution coin(0.5);
  // Direction i with probability p_i and fixed length, so the second moment
  // is d * scale^2 * V diag(p) V^T.
  const double amplitude = std::sqrt(static_cast<double>(d)) * scale;
  for (Index t = 0; t < n; ++t) {
    const Index i = pick(rng);
    const double sign = coin(rng) ? 1.0 : -1.0;
    out.rows.row(t) = (sign * amplitude) * out.basis.col(i).transpose();
  }
  return out;
}

Standardizer Standardizer::Fit(const Dataset& data) {
  if (data.size() < 2) {
    throw InvalidArgumentError("standardization needs at least two rows");
  }
  const double n = static_cast<double>(data.size());
  Standardizer out;
  out.mean = data.rows.colwise().sum().transpose() / n;
  out.scale.resize(data.dim());
  for (Index j = 0; j < data.dim(); ++j) {
    const double var =
        (data.rows.col(j).array() - out.mean[j]).square().sum() / n;
    const double sd = std::sqrt(var);
    // Rounding leaves ~1e-16 spread in a constant column; treat it as zero.
    out.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(out.mean[j])) ? sd : 1.0;
  }
  return out;
}

Dataset Standardizer::Apply(const Dataset& data) const {
  if (data.dim() != mean.size()) {
    throw DimensionError("standardizer fitted on " +
                         std::to_string(mean.size()) +
                         " columns, data has " + std::to_string(data.dim()));
  }
  Dataset out = data;
  out.rows = ((data.rows.rowwise() - mean.transpose()).array().rowwise() /
              scale.transpose().array())
                 .matrix();
  return out;
}

Normalized Normalize(const Dataset& data) {
  const Standardizer fit = Standardizer::Fit(data);
  return Normalized{fit.Apply(data), fit.mean, fit.scale};
}

Split SplitDataset(const Dataset& data, const std::array<double, 3>& fractions,
                   std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw InvalidArgumentError("split fractions must all be positive");
    }
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgumentError("split fractions must sum to one");
  }
  const Index n = data.size();
  const Index n_train = std::llround(static_cast<double>(n) * fractions[0]);
  const Index n_tune = std::llround(static_cast<double>(n) * fractions[1]);
  const Index n_test = n - n_train - n_tune;
  if (n_train < 1 || n_tune < 1 || n_test < 1) {
    throw InvalidArgumentError("split of " + std::to_string(n) +
                               " rows leaves an empty part");
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Split out;
  out.fractions = fractions;
  out.train = TakeRows(data, order, 0, n_train);
  out.tune = TakeRows(data, order, n_train, n_train + n_tune);
  out.test = TakeRows(data, order, n_train + n_tune, n);
  return out;
}

Dataset LoadCsv(const std::filesystem::path& path, CsvHeader header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() &&
         (lines.back().empty() || lines.back() == "\r")) {
    lines.pop_back();
  }
  if (lines.empty()) throw ParseError("empty CSV file", 1, 1);

  std::size_t first = 0;
  if (header == CsvHeader::kPresent) {
    first = 1;
  } else if (header == CsvHeader::kAuto) {
    const auto cells = SplitCsvLine(lines.front());
    try {
      ParseDouble(cells.front(), 1, 1);
    } catch (const ParseError&) {
      first = 1;
    }
  }
  if (first >= lines.size()) throw ParseError("CSV has no data rows", 1, 1);

  const Index d =
      static_cast<Index>(SplitCsvLine(lines[first]).size());
  const Index n = static_cast<Index>(lines.size() - first);
  Dataset out;
  out.provenance = Provenance::kFile;
  out.rows.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    const Index line_no = static_cast<Index>(first) + i + 1;
    const auto cells = SplitCsvLine(lines[first + i]);
    if (static_cast<Index>(cells.size()) != d) {
      throw ParseError("expected " + std::to_string(d) + " columns, found " +
                           std::to_string(cells.size()),
                       line_no,
                       std::min<Index>(static_cast<Index>(cells.size()), d) + 1);
    }
    for (Index j = 0; j < d; ++j) {
      out.rows(i, j) = ParseDouble(cells[j], line_no, j + 1);
    }
  }
  return out;
}

void SaveCsv(const Dataset& data, const std::filesystem::path& path,
             bool header) {
  std::ostringstream text;
  if (header) {
    for (Index j = 0; j < data.dim(); ++j) {
      text << (j ? "," : "") << 'x' << (j + 1);
    }
    text << '\n';
  }
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      text << (j ? "," : "") << FormatDouble(data.rows(i, j));
    }
    text << '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text.str();
  if (!out) throw IoError("write failed for " + path.string());
}

bool DatasetStream::Next(VectorXd& x) {
  if (rows_.rows() == 0) return false;
  if (position_ == rows_.rows()) {
    if (!cycle_) return false;
    position_ = 0;
  }
  x = rows_.row(position_++).transpose();
  return true;
}

}  // namespace streampca

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

#ifndef STREAMPCA_CLI_H_
#define STREAMPCA_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "streampca/common.h"
#include "streampca/solvers.h"

namespace streampca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr char kSeedEnv[] = "STREAMPCA_SEED";

// Bad flags or flag combinations; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GenerateSpec {
  Index n = 10000;
  Index d = 32;
  double spectrum_decay = 0.8;
  double scale = 1.0;
  std::uint64_t seed = 42;
  std::filesystem::path out = "data.csv";
};

struct RunSpec {
  std::vector<Method> methods;
  // Read samples from CSV instead of generating them.
  std::optional<std::filesystem::path> data;
  Index n = 10000;
  Index d = 32;
  double spectrum_decay = 0.8;
  double scale = 1.0;
  int k = 4;
  int cap = 5;
  // Fixed base step size; tuned over the grid when unset.
  std::optional<double> eta;
  // 0 means one pass over the training split.
  Index iters = 0;
  std::uint64_t seed = 42;
  std::filesystem::path out = "streampca_out";
  // 0 means ceil(T / 500).
  Index cadence = 0;
  bool timing = true;

  // Checks what can be checked before the data is loaded.
  void Validate() const;
};

// Sidecar metadata path for a generated CSV: data.csv -> data.meta.json.
std::filesystem::path MetadataPath(const std::filesystem::path& csv);

int CmdGenerate(const GenerateSpec& spec, std::ostream& out,
                std::ostream& err);
// One trajectory CSV per method: <out>/<method>.csv.
int CmdRun(const RunSpec& spec, std::ostream& out, std::ostream& err);
// All methods on one split and stream order: <out>/compare.csv.
int CmdCompare(const RunSpec& spec, std::ostream& out, std::ostream& err);

// Parses `args` (program name first) and dispatches to a subcommand.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace streampca::cli

#endif  // STREAMPCA_CLI_H_

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

#ifndef STREAMPCA_TRAJECTORY_H_
#define STREAMPCA_TRAJECTORY_H_

#include <vector>

#include "streampca/common.h"

namespace streampca {

struct TrajectoryRecord {
  Index iteration = 0;
  // Cumulative seconds spent inside solver steps; probing is not counted.
  double elapsed = 0.0;
  double objective = 0.0;
  double suboptimality = 0.0;
  Index rank = 0;

  bool operator==(const TrajectoryRecord&) const = default;
};

// Records are ordered by strictly increasing iteration.
struct Trajectory {
  std::vector<TrajectoryRecord> records;

  bool operator==(const Trajectory&) const = default;
};

}  // namespace streampca

#endif  // STREAMPCA_TRAJECTORY_H_

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

#ifndef STREAMPCA_FORMAT_H_
#define STREAMPCA_FORMAT_H_

#include <string>
#include <string_view>
#include <vector>

#include "streampca/common.h"

namespace streampca {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatDouble(double value);

// Parses a complete cell (surrounding blanks allowed). Throws ParseError with
// the given 1-based position on failure or non-finite values.
double ParseDouble(std::string_view cell, Index row, Index column);

// Splits one CSV line on commas; a trailing '\r' is dropped.
std::vector<std::string_view> SplitCsvLine(std::string_view line);

}  // namespace streampca

#endif  // STREAMPCA_FORMAT_H_

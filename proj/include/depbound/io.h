// Copyright 2026 The depbound Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Ingestion of the outcomes file (`id,x,d`) and the optional edges file
// (`id_i,id_j`). Rows are comma separated; a tab-separated header switches
// the whole file to tabs.

#ifndef DEPBOUND_IO_H_
#define DEPBOUND_IO_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "depbound/core.h"

namespace depbound {

// Parse failure with the 1-based line it occurred on.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct LoadedData {
  ObservedData data;
  // False when the outcomes file has no `d` column; degrees are then n - 1.
  bool degrees_present = true;
  std::vector<std::string> warnings;
};

// Reads outcomes, then edges when `edges` is non-null. Unknown IDs in the
// edges file and duplicate IDs in the outcomes file are ParseErrors;
// duplicate edges are dropped with a warning.
LoadedData ReadObservedData(std::istream& outcomes, std::istream* edges,
                            const std::string& outcomes_name = "outcomes",
                            const std::string& edges_name = "edges");

LoadedData LoadObservedData(const std::string& outcomes_path,
                            const std::optional<std::string>& edges_path);

// Replaces every reported degree with `bound`.
ObservedData WithGlobalDegreeBound(ObservedData data, std::int64_t bound);

}  // namespace depbound

#endif  // DEPBOUND_IO_H_

// Copyright 2026 The ProbeKit Authors
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

#include "probekit/error.h"

namespace probekit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kUnknownLabel: return "unknown-label";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kDegenerateProperty: return "degenerate-property";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kCorruptData: return "corrupt-data";
    case ErrorCode::kLength: return "length";
    case ErrorCode::kJoin: return "join";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kEmptyData: return "empty-data";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kUndefinedCorrelation: return "undefined-correlation";
    case ErrorCode::kSchema: return "schema";
  }
  return "unknown";
}

}  // namespace probekit

// Copyright 2026 The measdual Authors.
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

#include "measdual/result.hpp"

namespace measdual {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "syntax error";
    case ErrorCode::kUnknownFunction: return "unknown function";
    case ErrorCode::kUnknownIdentifier: return "unknown identifier";
    case ErrorCode::kArity: return "arity error";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kTooLarge: return "too large";
    case ErrorCode::kSchema: return "schema error";
    case ErrorCode::kPartition: return "partition error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInternal: return "internal error";
  }
  return "error";
}

std::string Error::describe() const {
  std::string out = to_string(code);
  if (offset) out += " at offset " + std::to_string(*offset);
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace measdual

// Copyright 2026 The AASP Authors.
//
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

#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace aasp {

// Error categories surfaced to callers and mapped to CLI exit codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kInvalidStructure,
  kIllegalAction,
  kParse,
  kSchema,
  kVersion,
  kIo,
  kInternal,
};

inline const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidStructure: return "invalid_structure";
    case ErrorCode::kIllegalAction: return "illegal_action";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kVersion: return "version_mismatch";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kInternal: return "internal_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

namespace internal {

template <typename... Args>
std::string StrCat(Args &&...args) {
  std::ostringstream oss;
  (oss << ... << std::forward<Args>(args));
  return oss.str();
}

}  // namespace internal

template <typename... Args>
[[noreturn]] void Fail(ErrorCode code, Args &&...args) {
  throw Error(code, internal::StrCat(std::forward<Args>(args)...));
}

}  // namespace aasp

// Copyright 2026 The contamkit Authors.
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

#include <stdexcept>
#include <string>

namespace contamkit {

enum class ErrorCode {
  Argument,
  Parse,
  Io,
  Capability,
  Transport,
  RateLimit,
  Protocol,
  DegenerateInput,
  Integrity,
  Sampling,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Argument: return "argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    case ErrorCode::Capability: return "capability";
    case ErrorCode::Transport: return "transport";
    case ErrorCode::RateLimit: return "rate-limit";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::Integrity: return "integrity";
    case ErrorCode::Sampling: return "sampling";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace contamkit

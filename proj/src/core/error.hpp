// Copyright 2026 The hrtfkit Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace hrtf {

// Error categories. They map one-to-one onto the C API status codes and
// onto the CLI exit codes (usage/config -> 2, data -> 3, numeric -> 4).
enum class ErrorCode {
  kInvalidArgument = 1,  // bad parameter, config schema violation
  kIo = 2,               // filesystem failure
  kFormat = 3,           // malformed container/checkpoint contents
  kNumeric = 4,          // NaN/Inf, singular system, undefined statistic
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorCode::kIo, msg);
}
[[noreturn]] inline void throw_format(const std::string& msg) {
  throw Error(ErrorCode::kFormat, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw Error(ErrorCode::kNumeric, msg);
}
[[noreturn]] inline void throw_internal(const std::string& msg) {
  throw Error(ErrorCode::kInternal, msg);
}

}  // namespace hrtf

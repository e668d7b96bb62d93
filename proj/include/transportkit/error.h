// Copyright 2026 The transportkit Authors.
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

#ifndef TRANSPORTKIT_ERROR_H_
#define TRANSPORTKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace transportkit {

// Broad failure classes. The CLI maps them onto process exit codes
// (usage 1, data 2, numerical 3).
enum class ErrorKind {
  kUsage,
  kData,
  kNumerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error UsageError(const std::string& message) {
  return Error(ErrorKind::kUsage, message);
}

inline Error DataError(const std::string& message) {
  return Error(ErrorKind::kData, message);
}

inline Error NumericalError(const std::string& message) {
  return Error(ErrorKind::kNumerical, message);
}

int ExitCodeFor(ErrorKind kind);

}  // namespace transportkit

#endif  // TRANSPORTKIT_ERROR_H_

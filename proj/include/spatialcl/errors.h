// Copyright 2026 The spatialcl Authors.
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

#ifndef SPATIALCL_ERRORS_H_
#define SPATIALCL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace spatialcl {

enum class ErrorKind {
  kFormat,       // malformed input file
  kUnsupported,  // valid input we do not handle
  kSize,         // shape or length mismatch
  kIo,
  kConfig,
  kData,
  kNumeric,
  kSampling,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error kind: 1 usage/config, 2 data, 3 numeric.
int ExitCodeFor(ErrorKind kind);

const char* ErrorKindName(ErrorKind kind);

}  // namespace spatialcl

#endif  // SPATIALCL_ERRORS_H_

// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IFAA_ERROR_HPP
#define IFAA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ifaa {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files (CSV cells, config keys, ...). Messages name the
// offending row/column/key.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input that violates a contract (duplicate ids, negative
// counts, constant tested covariate, bad config value, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Raised when the selection threshold leaves no taxon in set B, i.e. no
// independent reference candidate exists. The analyze command maps this to
// its own fallback path and exit code.
class EmptySetBError : public Error {
 public:
  explicit EmptySetBError(const std::string& msg) : Error(msg) {}
};

}  // namespace ifaa

#endif  // IFAA_ERROR_HPP

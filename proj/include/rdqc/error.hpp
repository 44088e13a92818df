// Copyright 2026 The rdqc Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdqc {

/// Base class for every error a protocol component raises when one of its
/// input contracts does not hold. The CLI maps these to exit code 2.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed circuit text. `line` is 1-based; 0 when not tied to a line.
class ParseError : public ContractViolation {
 public:
  ParseError(std::size_t line, const std::string &what)
      : ContractViolation(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A configured size cap (qubits, enumeration bits, draw budget, k) was exceeded.
class CapExceeded : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// Every server report was zero, so the normalized estimate is undefined.
class DegenerateAggregation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// Transcript file problems: wrong schema version or corrupt contents.
class TranscriptError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

}  // namespace rdqc

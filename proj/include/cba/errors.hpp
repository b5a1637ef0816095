// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cba {

// Bad user input: schema violations, dimension mismatches, violated
// preconditions. Maps to CLI exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The tool could not produce a trustworthy answer: non-convergent limits,
// inconclusive sampling, unbounded intermediate sets. Maps to CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : InputError {
  ParseError(std::size_t offset, const std::string& what)
      : InputError("syntax error at offset " + std::to_string(offset) + ": " + what),
        offset(offset) {}
  std::size_t offset;
};

}  // namespace cba

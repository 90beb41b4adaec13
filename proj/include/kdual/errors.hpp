#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kdual {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input (config, expression, out-of-range parameter). CLI exit 1.
struct InputError : Error {
  using Error::Error;
};

// A verified mathematical condition failed (dual does not exist, symmetry
// violated beyond tolerance, ...). CLI exit 2.
struct ConditionFailure : Error {
  using Error::Error;
};

// Internal numeric breakdown (singular solve, step too large).
struct NumericError : Error {
  using Error::Error;
};

struct ParseError : InputError {
  std::size_t position;
  ParseError(std::size_t pos, const std::string& msg)
      : InputError("parse error at position " + std::to_string(pos) + ": " + msg),
        position(pos) {}
};

struct EvalError : InputError {
  using InputError::InputError;
};

}  // namespace kdual

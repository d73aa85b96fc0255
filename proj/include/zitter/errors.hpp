#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace zitter {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// core
struct NonHermitianInput : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotNormalized : Error {
  using Error::Error;
};
// Sampled projector annihilates the state: the sampler and the Born weights
// disagree, which can only be an internal inconsistency.
struct DegenerateOutcome : Error {
  using Error::Error;
};

// querymodel
struct UnsupportedSize : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};

// discriminate
struct Contradiction : Error {
  using Error::Error;
};
struct Unresolved : Error {
  Unresolved(std::string msg, int odd, int even, int tests)
      : Error(std::move(msg)), surviving_odd(odd), surviving_even(even), tests_used(tests) {}
  int surviving_odd;
  int surviving_even;
  int tests_used;
};

// formula
struct SyntaxError : Error {
  SyntaxError(const std::string& msg, std::size_t pos)
      : Error(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
  std::size_t position;
};
struct VariableLimit : Error {
  using Error::Error;
};
struct ArityMismatch : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};

// qtp
struct BadEpsilon : Error {
  using Error::Error;
};
struct BadSampleCount : Error {
  using Error::Error;
};
struct InfeasibleRequest : Error {
  using Error::Error;
};

}  // namespace zitter

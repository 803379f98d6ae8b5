#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace branchdiam {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A symbol outside the group's alphabet, or malformed word syntax.
struct InvalidWordError : Error {
  using Error::Error;
};

// An operation that does not apply to the given group family.
struct UnsupportedOperationError : Error {
  using Error::Error;
};

// A recursion guard was hit before the question could be decided.
// Carries the depth that was reached; never silently wrong.
struct UndecidedError : Error {
  int depth_reached;
  UndecidedError(const std::string& msg, int depth)
      : Error(msg), depth_reached(depth) {}
};

// An enumeration or memory cap was exceeded. Carries the count reached.
struct CapExceededError : Error {
  std::uint64_t count_reached;
  CapExceededError(const std::string& msg, std::uint64_t count)
      : Error(msg), count_reached(count) {}
};

// A generating set failed to generate. Carries the order actually reached.
struct NonGeneratingError : Error {
  std::uint64_t subgroup_order;
  NonGeneratingError(const std::string& msg, std::uint64_t order)
      : Error(msg), subgroup_order(order) {}
};

// Internal data structures disagree (e.g. an image element missing from a
// quotient that should contain it).
struct InconsistencyError : Error {
  using Error::Error;
};

// A documented precondition of an operation failed.
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace branchdiam

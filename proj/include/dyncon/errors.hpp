#pragma once

#include <stdexcept>
#include <string>

namespace dyncon {

// Input that violates an operation's preconditions (duplicate operations,
// non-permutations, unknown methods or accounts, unparseable files).
class MalformedInput : public std::runtime_error {
 public:
  explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

// An exhaustive enumeration would exceed its configured bound.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A property the algorithms guarantee was observed broken. Signals a bug in
// the engine or harness, never bad user input.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace dyncon

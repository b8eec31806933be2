#pragma once

#include <stdexcept>
#include <string>

namespace qdisc {

/// Input failed a type invariant (Hermiticity, trace, PSD, dimensions, ...).
/// The CLI maps this to exit code 2.
class InvariantError : public std::invalid_argument {
 public:
  explicit InvariantError(const std::string& what) : std::invalid_argument(what) {}
};

/// Every optimizer start returned the +inf sentinel. CLI exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// A mathematical guarantee failed to hold on a computed result. Indicates a bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace qdisc

#pragma once

#include <stdexcept>
#include <string>

namespace ergx {

/// Input lies outside what a routine can handle: bad sizes, points outside
/// the support polytope, unsupported dimensions, infeasible enumeration.
class InfeasibleInput : public std::invalid_argument {
 public:
  explicit InfeasibleInput(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine failed to reach its tolerance (divergence, line
/// search exhaustion, ambiguous floating-point classification).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ergx

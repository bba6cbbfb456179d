#pragma once

#include <stdexcept>
#include <string>

namespace segsamp {

enum class ErrorKind {
  OutOfRangeCoordinate,
  SelfLoop,
  BadIndex,
  DegenerateEdge,
  DomainViolation,
  Infeasible,
  MaxIterations,
  InconsistentConstraints,
  SizeLimit,
  BadPermutation,
  DimensionMismatch,
  EmptyEdgeSet,
  UnsupportedDimension,
  LengthMismatch,
  BadData,
  SingularDesign,
  InvalidArgument,
};

const char* error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace segsamp

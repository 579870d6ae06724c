#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyvf {

enum class ErrorKind {
  InvalidInput,
  NotCentered,
  DegreeTooLow,
  NoConvergence,
  NotARoot,
  NonPositiveScale,
  PathThroughSingularity,
  InsideEscapeRadius,
  UncertainClassification,
  MalformedBracketing,
  ParityViolation,
  CrossingPairs,
  InconsistentZone,
  CapExceeded,
  IndexNotHomoclinic,
  NotAHomoclinic,
  NotImplementedTransition,
  InconsistentGraph,
  CrossingPathHitsSingularity,
  UnboundedFace,
  ClassUnreachable,
  NotLanding,
  RadiusTooLarge,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace polyvf

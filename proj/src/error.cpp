#include "polyvf/error.hpp"

namespace polyvf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::DegreeTooLow: return "DegreeTooLow";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotARoot: return "NotARoot";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::PathThroughSingularity: return "PathThroughSingularity";
    case ErrorKind::InsideEscapeRadius: return "InsideEscapeRadius";
    case ErrorKind::UncertainClassification: return "UncertainClassification";
    case ErrorKind::MalformedBracketing: return "MalformedBracketing";
    case ErrorKind::ParityViolation: return "ParityViolation";
    case ErrorKind::CrossingPairs: return "CrossingPairs";
    case ErrorKind::InconsistentZone: return "InconsistentZone";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::IndexNotHomoclinic: return "IndexNotHomoclinic";
    case ErrorKind::NotAHomoclinic: return "NotAHomoclinic";
    case ErrorKind::NotImplementedTransition: return "NotImplementedTransition";
    case ErrorKind::InconsistentGraph: return "InconsistentGraph";
    case ErrorKind::CrossingPathHitsSingularity: return "CrossingPathHitsSingularity";
    case ErrorKind::UnboundedFace: return "UnboundedFace";
    case ErrorKind::ClassUnreachable: return "ClassUnreachable";
    case ErrorKind::NotLanding: return "NotLanding";
    case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
  }
  return "Unknown";
}

}  // namespace polyvf

#include "gsis/error.hpp"

namespace gsis {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSignal: return "InvalidSignal";
    case ErrorKind::DuplicatePoints: return "DuplicatePoints";
    case ErrorKind::DuplicateNodes: return "DuplicateNodes";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::NonRealAutocorrelation: return "NonRealAutocorrelation";
    case ErrorKind::NegativeModulus: return "NegativeModulus";
    case ErrorKind::InvalidLeadingCoefficient: return "InvalidLeadingCoefficient";
    case ErrorKind::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorKind::InconsistentData: return "InconsistentData";
    case ErrorKind::ZeroSignal: return "ZeroSignal";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace gsis

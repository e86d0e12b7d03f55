#include "emis/error.hpp"

namespace emis {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateMedium: return "DegenerateMedium";
    case ErrorCode::NegativeAbsorption: return "NegativeAbsorption";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::PointInsideDomain: return "PointInsideDomain";
    case ErrorCode::PolarizationDegenerate: return "PolarizationDegenerate";
    case ErrorCode::DegenerateAmplitude: return "DegenerateAmplitude";
    case ErrorCode::InconsistentQuadratures: return "InconsistentQuadratures";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace emis

#pragma once

#include <stdexcept>
#include <string>

namespace emis {

enum class ErrorCode {
  InvalidArgument,
  DegenerateMedium,
  NegativeAbsorption,
  SingularPoint,
  NonConvergence,
  SingularSystem,
  GridTooCoarse,
  PointInsideDomain,
  PolarizationDegenerate,
  DegenerateAmplitude,
  InconsistentQuadratures,
  ZeroTruth,
  InstanceTooLarge,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace emis

#pragma once

#include <stdexcept>
#include <string>

namespace uot {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct EmptySample : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Sinkhorn fixed point not reached at the final epsilon level.
struct NonConvergence : Error {
  NonConvergence(const std::string& what, double residual_)
      : Error(what), residual(residual_) {}
  double residual;
};

struct NegativeWeight : Error {
  using Error::Error;
};

struct InfeasibleOracle : Error {
  using Error::Error;
};

struct DegenerateDensity : Error {
  using Error::Error;
};

struct MassMismatch : Error {
  using Error::Error;
};

struct DegenerateFit : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace uot

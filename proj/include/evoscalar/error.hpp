#pragma once

#include <stdexcept>
#include <string>

namespace evo {

// Two failure families. The CLI maps InputError to exit code 1 and
// NumericalError to exit code 2.
class InputError : public std::invalid_argument {
public:
  InputError(std::string reason, const std::string& what)
      : std::invalid_argument(what), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string reason_;
};

class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string reason, const std::string& what)
      : std::runtime_error(what), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

private:
  std::string reason_;
};

// Reason codes used across modules.
namespace reason {
inline constexpr const char* kParameter = "parameter";
inline constexpr const char* kPole = "pole";
inline constexpr const char* kDimension = "dimension";
inline constexpr const char* kSingularity = "singularity";
inline constexpr const char* kDivergentIntegral = "divergent-integral";
inline constexpr const char* kHorizon = "horizon";
inline constexpr const char* kDegenerateFit = "degenerate-fit";
inline constexpr const char* kUnknownOperator = "unknown-operator";
inline constexpr const char* kIndexMismatch = "index-mismatch";
inline constexpr const char* kGridMismatch = "grid-mismatch";
inline constexpr const char* kAliasing = "aliasing";
inline constexpr const char* kExponent = "exponent";
inline constexpr const char* kUnboundedSup = "unbounded-sup";
inline constexpr const char* kWindow = "window";
inline constexpr const char* kPrecondition = "precondition";
inline constexpr const char* kSupercritical = "supercritical";
inline constexpr const char* kEmptyInterval = "empty-interval";
inline constexpr const char* kTargetBelowTwo = "q-below-2";
inline constexpr const char* kFormat = "format";
inline constexpr const char* kAccuracy = "accuracy";
inline constexpr const char* kConvergence = "convergence";
inline constexpr const char* kIllPosed = "ill-posed";
inline constexpr const char* kStepRejected = "step-rejected";
inline constexpr const char* kDivergence = "divergence";
}  // namespace reason

}  // namespace evo

#pragma once

#include <stdexcept>
#include <string>

namespace diraclab {

// Exit-code categories used by the CLI: config errors (2), physical guard
// violations (3), numerical failures (4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GuardViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GapViolation : GuardViolation {
  using GuardViolation::GuardViolation;
};
struct NyquistViolation : GuardViolation {
  using GuardViolation::GuardViolation;
};
struct BoundaryViolation : GuardViolation {
  using GuardViolation::GuardViolation;
};
struct PresetNotPeriodic : GuardViolation {
  using GuardViolation::GuardViolation;
};
struct NotFreePreset : GuardViolation {
  using GuardViolation::GuardViolation;
};
struct EmptyShell : GuardViolation {
  using GuardViolation::GuardViolation;
};
struct BlockDiagonalityViolated : GuardViolation {
  using GuardViolation::GuardViolation;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientDerivativeOrder : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct OrderUnavailable : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct ClusterOverlap : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct StepFailure : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct ToleranceNotMet : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct ConvergenceFailure : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct EInSpectrum : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct WindowEmpty : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};
struct EmptyRetainedSet : NumericalFailure {
  using NumericalFailure::NumericalFailure;
};

}  // namespace diraclab

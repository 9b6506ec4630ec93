#pragma once

#include <stdexcept>
#include <string>

namespace osmorom {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define OSMOROM_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  };

OSMOROM_DEFINE_ERROR(MeshGenerationFailure)
OSMOROM_DEFINE_ERROR(MeshFormatError)
OSMOROM_DEFINE_ERROR(NonFiniteValue)
OSMOROM_DEFINE_ERROR(ShapeMismatch)
OSMOROM_DEFINE_ERROR(DegenerateMapping)
OSMOROM_DEFINE_ERROR(SingularSystem)
OSMOROM_DEFINE_ERROR(EmptySnapshotSet)
OSMOROM_DEFINE_ERROR(ZeroTrainingSet)
OSMOROM_DEFINE_ERROR(DimensionMismatch)
OSMOROM_DEFINE_ERROR(FormatVersionMismatch)
OSMOROM_DEFINE_ERROR(ChecksumMismatch)
OSMOROM_DEFINE_ERROR(SingularReducedSystem)
OSMOROM_DEFINE_ERROR(NonFiniteTheta)
OSMOROM_DEFINE_ERROR(PointLocationFailure)
OSMOROM_DEFINE_ERROR(ConfigError)

#undef OSMOROM_DEFINE_ERROR

/// Wraps a failure inside a time loop with the index of the failing step.
class StepFailure : public Error {
 public:
  StepFailure(int step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace osmorom

#pragma once

#include <stdexcept>
#include <string>

namespace itee {

/// Base of every error raised by the library. Callers that only need to
/// report a failure can catch this; the derived types name the condition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ITEE_DEFINE_ERROR(Name) \
  class Name : public Error {   \
   public:                      \
    using Error::Error;         \
  };

ITEE_DEFINE_ERROR(NonPositiveTemperature)
ITEE_DEFINE_ERROR(SingularDeformation)
ITEE_DEFINE_ERROR(NotPositiveDefinite)
ITEE_DEFINE_ERROR(InvalidMaterial)
ITEE_DEFINE_ERROR(GridTooSmall)
ITEE_DEFINE_ERROR(PartitionMismatch)
ITEE_DEFINE_ERROR(SolveFailure)
ITEE_DEFINE_ERROR(StabilityViolation)
ITEE_DEFINE_ERROR(NonUniformBiasTemperature)
ITEE_DEFINE_ERROR(PreconditionFailed)
ITEE_DEFINE_ERROR(InsufficientHorizon)
ITEE_DEFINE_ERROR(ValidationError)

#undef ITEE_DEFINE_ERROR

/// Malformed configuration text. Carries the offending line (1-based, 0 when
/// unknown) and key path.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string key)
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace itee

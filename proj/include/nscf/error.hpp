#pragma once

#include <stdexcept>
#include <string>

namespace nscf {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  IllConditioned,
  UnboundedBall,
  Infeasible,
  InvalidMetric,
  Unsupported,
  ZeroVector,
  OffSphere,
  UnknownPoint,
  NotIndependent,
  NotEigenvector,
  VacuousLemma,
  NotMultiplier,
  NotIsometric,
  InconsistentComponent,
  IdentityViolated,
  VacuousCore,
  Parse,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace nscf

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mw {

enum class ErrorKind {
  InvalidParameter,
  DimensionMismatch,
  NotStochastic,
  NotIrreducible,
  NotReversible,
  EigensolverFailure,
  ZeroStationaryMass,
  BudgetExceeded,
  Infeasible,
  Undefined,
  Parse,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::ZeroStationaryMass: return "ZeroStationaryMass";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Undefined: return "Undefined";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace detail
}  // namespace mw

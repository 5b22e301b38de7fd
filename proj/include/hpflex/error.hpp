#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpflex {

enum class ErrorKind {
  missing_value,
  negative_value,
  out_of_range,
  bad_header,
  malformed_row,
  coverage,
  division_domain,
  infeasible_bounds,
  alignment,
  io,
  unknown_variant,
  mismatched_scenario,
  invalid_argument,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_value: return "MissingValue";
    case ErrorKind::negative_value: return "NegativeValue";
    case ErrorKind::out_of_range: return "OutOfRange";
    case ErrorKind::bad_header: return "BadHeader";
    case ErrorKind::malformed_row: return "MalformedRow";
    case ErrorKind::coverage: return "CoverageError";
    case ErrorKind::division_domain: return "DivisionDomain";
    case ErrorKind::infeasible_bounds: return "InfeasibleBounds";
    case ErrorKind::alignment: return "AlignmentError";
    case ErrorKind::io: return "IoError";
    case ErrorKind::unknown_variant: return "UnknownVariant";
    case ErrorKind::mismatched_scenario: return "MismatchedScenario";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

// Every error raised by the library carries a kind so callers (and the CLI's
// exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hpflex

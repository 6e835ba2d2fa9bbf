#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foscan {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedOrder,
  InsufficientData,
  DegenerateVariance,
  NumericalFailure,
  EpochMismatch,
  EmptyWindow,
  ParseError,
  EmptyPanel,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the toolkit; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class WarningCode {
  DegenerateVariance,
  SingularPredictedVariance,
  DegenerateSd,
};

std::string_view to_string(WarningCode code);

// Non-fatal conditions. Operations that can degrade gracefully append here
// instead of throwing.
struct Warning {
  WarningCode code;
  std::string message;

  bool operator==(const Warning&) const = default;
};

using Warnings = std::vector<Warning>;

inline void warn(Warnings* sink, WarningCode code, std::string message) {
  if (sink != nullptr) sink->push_back({code, std::move(message)});
}

}  // namespace foscan

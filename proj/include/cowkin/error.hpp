#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cowkin {

enum class ErrorKind {
  BraggUnreachable,
  InvalidInput,
  EvanescentBranch,
  DegenerateInput,
  OutOfRegime,
  ConfigInvalid,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BraggUnreachable: return "BraggUnreachable";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::EvanescentBranch: return "EvanescentBranch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

// Carries the failing operation name so the CLI can report it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string op, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + " in " + op + ": " + detail),
        kind_(kind),
        op_(std::move(op)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& op() const noexcept { return op_; }

 private:
  ErrorKind kind_;
  std::string op_;
};

}  // namespace cowkin

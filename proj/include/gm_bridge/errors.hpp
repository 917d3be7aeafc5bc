#pragma once

#include <stdexcept>
#include <string>

namespace gm_bridge {

enum class ErrorKind {
  invalid_argument,
  invalid_distribution,
  unresolvable_quantization,
  retry_budget_exceeded,
  stranded_path,
  config,
  runaway_rate,
};

const char* error_kind_name(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gm_bridge

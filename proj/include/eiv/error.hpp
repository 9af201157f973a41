#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eiv {

enum class ErrorKind {
  contract_violation,
  not_spd,
  invalid_dof,
  index_out_of_range,
  rank_deficient,
  config,
  data,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure is reported through this type; `kind()` is stable
/// and ends up in the CLI's machine-readable error output.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::contract_violation: return "contract_violation";
    case ErrorKind::not_spd: return "not_spd";
    case ErrorKind::invalid_dof: return "invalid_dof";
    case ErrorKind::index_out_of_range: return "index_out_of_range";
    case ErrorKind::rank_deficient: return "rank_deficient";
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorKind::contract_violation, message);
}

}  // namespace eiv

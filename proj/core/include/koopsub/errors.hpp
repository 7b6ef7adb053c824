#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace koopsub {

enum class ErrorCode {
  invalid_matrix,
  invalid_input,
  precondition_violation,
  internal_error,
  degenerate_dictionary,
  signature_rank,
  abort_round,
  no_termination,
  numerical_error,
  degenerate_eigenfunction,
  degenerate_observable,
  io_error,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the CLI
// maps them onto process exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace koopsub

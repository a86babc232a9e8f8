#pragma once

#include <stdexcept>
#include <string>

namespace lyapb {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  index_out_of_range,
  not_spd,
  singular_pivot,
  degenerate_interval,
  consistency,
  quadrature_failure,
  breakdown,
  no_admissible_tau,
  io,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception thrown by every numerical kernel in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lyapb

#pragma once

#include <stdexcept>
#include <string>

namespace superlin {

enum class ErrorCode {
  invalid_argument,
  no_fock_law,
  saturated_measurement,
  superunity_efficiency,
  extrapolation_refused,
  no_detections,
  infinite_loss,
  data_format,
  io,
};

// Every failure raised by the library carries one of the codes above so
// callers (and tests) can tell error kinds apart without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code) noexcept;

}  // namespace superlin

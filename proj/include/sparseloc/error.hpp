#pragma once

#include <stdexcept>
#include <string>

namespace sparseloc {

enum class ErrorCode {
  InvalidInput,      // non-finite numbers, malformed arguments
  InvalidCamera,     // rig violates its invariants
  InvalidBox,        // pixel box violates its invariants
  InsufficientData,  // too few points for the requested statistic
  DegenerateCloud,   // all points coincident
  InputFormat,       // unreadable or schema-invalid input file
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sparseloc

#pragma once

#include <stdexcept>
#include <string>

namespace qrngq {

// Numeric values are mirrored by qrngq_status in the C header.
enum class ErrorCode : int {
  kInvalidInput = 1,
  kEmptyInput = 2,
  kInvalidSupport = 3,
  kDegenerateSupport = 4,
  kMassMismatch = 5,
  kShapeMismatch = 6,
  kLagTooLarge = 7,
  kZeroVariance = 8,
  kInvalidCoefficient = 9,
  kNumericalDivergence = 10,
  kTraceTooShort = 11,
  kInvalidConfig = 12,
  kNoSignal = 13,
  kParse = 14,
  kIo = 15,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qrngq

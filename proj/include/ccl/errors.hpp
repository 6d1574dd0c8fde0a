#ifndef CCL_ERRORS_HPP
#define CCL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVariance : Error { using Error::Error; };
struct ZeroRange : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct FactorOutOfRange : Error { using Error::Error; };
struct SegmentTooShort : Error { using Error::Error; };
struct NonPositiveGain : Error { using Error::Error; };
struct SpecInvalid : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct UnsupportedInputLen : Error { using Error::Error; };
struct UnsortedInput : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace ccl

#endif  // CCL_ERRORS_HPP

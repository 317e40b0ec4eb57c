#pragma once

#include <stdexcept>
#include <string>

namespace discbench {

// Root of every error the library raises. Catch this to handle any failure
// from a fit, a file read or a statistical routine in one place.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class SingularityError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class CorruptionError : public Error { using Error::Error; };
class LengthError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };
class DegenerateClassError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };
class RankCollapseError : public Error { using Error::Error; };
class NumericError : public Error { using Error::Error; };
class UndefinedCorrelationError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };

}  // namespace discbench

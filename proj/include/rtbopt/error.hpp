#pragma once

#include <stdexcept>
#include <string>

namespace rtbopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad configuration, schema violations, invalid weights.
/// The CLI maps these to exit code 2.
class ValidationError : public Error
{
public:
  using Error::Error;
};

}  // namespace rtbopt

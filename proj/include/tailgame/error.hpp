#pragma once

#include <stdexcept>
#include <string>

namespace tailgame {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data, configuration, or argument. CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// Non-finite parameters or a violated numerical bound. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tailgame

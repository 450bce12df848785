#pragma once

#include <stdexcept>
#include <string>

namespace blab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical regime assumption failed (spectral gap, quadrature size...).
/// Carries the offending N when there is one.
class RegimeError : public Error {
 public:
  RegimeError(const std::string& what, int N = -1)
      : Error(N >= 0 ? what + " (N=" + std::to_string(N) + ")" : what), n_(N) {}
  int N() const { return n_; }

 private:
  int n_;
};

}  // namespace blab

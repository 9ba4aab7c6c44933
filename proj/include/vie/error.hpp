// SPDX-License-Identifier: Apache-2.0

#ifndef VIE_ERROR_HPP
#define VIE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vie
{

// Base class for all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Bad argument or precondition violation (invalid grid, medium profile, config...).
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

// A numerical procedure failed: singular pivot, quadrature or SVD non-convergence,
// Krylov breakdown.
class NumericalError : public Error
{
public:
  using Error::Error;
};

inline void Require(bool condition, const std::string &message)
{
  if (!condition)
  {
    throw InvalidArgument(message);
  }
}

}  // namespace vie

#endif  // VIE_ERROR_HPP

// SPDX-License-Identifier: Apache-2.0

#ifndef MATEXPRE_ERROR_HPP
#define MATEXPRE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace matexpre
{

/// Root of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (vector lengths, matrix dimensions, grid shapes).
class DimensionError : public Error
{
public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error
{
public:
  using Error::Error;
};

/// Malformed or inconsistent input file.
class FormatError : public Error
{
public:
  using Error::Error;
};

/// An iterative process stopped before reaching its tolerance. Subclasses carry
/// the partial result.
class ConvergenceError : public Error
{
public:
  using Error::Error;
};

}  // namespace matexpre

#endif  // MATEXPRE_ERROR_HPP

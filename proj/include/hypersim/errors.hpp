// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace hypersim
{

// Every failure the library reports derives from Error. The CLI maps the
// category to its exit status.
enum class ErrorCategory
{
    InvalidArgument = 4,
    Schema = 3,
    Io = 5,
    Delivery = 6,
};

class Error : public std::runtime_error
{
  public:
    explicit Error(const std::string &what, ErrorCategory cat = ErrorCategory::InvalidArgument)
        : std::runtime_error(what), category_(cat)
    {
    }
    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

struct InvalidAngleError : Error
{
    using Error::Error;
};

struct GrazingError : Error
{
    using Error::Error;
};

struct UndefinedSpreadError : Error
{
    using Error::Error;
};

struct EmptyProblemError : Error
{
    using Error::Error;
};

struct AddressingError : Error
{
    using Error::Error;
};

struct ParameterError : Error
{
    using Error::Error;
};

struct DeliveryError : Error
{
    explicit DeliveryError(const std::string &what) : Error(what, ErrorCategory::Delivery) {}
};

struct IoError : Error
{
    explicit IoError(const std::string &what) : Error(what, ErrorCategory::Io) {}
};

struct SchemaError : Error
{
    SchemaError(const std::string &what, int line)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what, ErrorCategory::Schema), line_(line)
    {
    }
    /// 1-based line in the offending file, or -1 when unknown.
    int line() const noexcept { return line_; }

  private:
    int line_;
};

} // namespace hypersim

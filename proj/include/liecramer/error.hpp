#pragma once

#include <stdexcept>
#include <string>

namespace liecramer {

enum class ErrorKind {
  InvalidArgument,
  InvalidDimension,
  OutOfDomain,
  Singular,
  Numeric,
  Infeasible,
  Convergence,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so that the C API can
/// map it to a status code without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace liecramer

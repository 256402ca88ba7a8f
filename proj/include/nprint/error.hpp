#pragma once

#include <stdexcept>
#include <string>

namespace nprint {

/// Failure category. The numeric values double as process exit codes.
enum class ErrorKind : int {
  usage = 1,
  format = 2,
  io = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::usage, what}; }
inline Error format_error(const std::string& what) { return {ErrorKind::format, what}; }
inline Error io_error(const std::string& what) { return {ErrorKind::io, what}; }

}  // namespace nprint

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace msfault {

enum class ErrorCode {
  InvalidArgument = 1,
  OutOfRange = 2,
  Parse = 3,
  Io = 4,
  Runtime = 5,
};

/// Every failure raised by the core carries one of the codes above; the C API
/// maps them one-to-one onto msf_status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace msfault

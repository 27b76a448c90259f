#pragma once

#include <stdexcept>
#include <string>

namespace csecoc {

enum class ErrorCode {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  data = 4,
  numeric = 5,
  internal = 6,
};

/// Exception type thrown by every module in the core library. The code is
/// what crosses the C boundary; the message is kept for csecoc_last_error().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace csecoc

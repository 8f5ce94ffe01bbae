#pragma once

#include <stdexcept>
#include <string>

namespace gpduo {

// Domain error carrying a machine-readable kind tag (e.g. "BracketFailure").
// The CLI turns these into exit code 1 with a JSON error document.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message);

  const std::string& kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string kind_;
  std::string message_;
};

[[noreturn]] void fail(const std::string& kind, const std::string& message);

// Precondition violations share one kind so callers can tell them apart from
// numerical failures.
inline void require(bool condition, const std::string& message) {
  if (!condition) fail("InvalidArgument", message);
}

// Compact "%.6g" rendering for messages.
std::string num(double v);

}  // namespace gpduo

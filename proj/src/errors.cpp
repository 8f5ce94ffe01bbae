#include "gpduo/errors.hpp"

#include <cstdio>

namespace gpduo {

Error::Error(std::string kind, const std::string& message)
    : std::runtime_error(kind + ": " + message), kind_(std::move(kind)), message_(message) {}

void fail(const std::string& kind, const std::string& message) {
  throw Error(kind, message);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace gpduo

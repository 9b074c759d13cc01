#include "sphrec/error.hpp"

#include <iostream>
#include <mutex>

namespace sphrec {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (handler())
    handler()(message);
  else
    std::cerr << "warning: " << message << '\n';
}

}  // namespace sphrec

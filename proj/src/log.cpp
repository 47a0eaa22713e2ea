#include "irj/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace irj {
namespace {

std::atomic<std::size_t> g_count{0};
std::mutex g_mutex;

void default_handler(const std::string& msg) {
  // Long runs can hit the same numerical edge case many times; keep stderr readable.
  if (g_count.load() <= 20) std::cerr << "warning: " << msg << '\n';
  if (g_count.load() == 20) std::cerr << "warning: further warnings suppressed\n";
}

WarningHandler& handler() {
  static WarningHandler h = default_handler;
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard lock(g_mutex);
  WarningHandler old = std::move(handler());
  handler() = h ? std::move(h) : WarningHandler(default_handler);
  return old;
}

void warn(const std::string& message) {
  ++g_count;
  std::lock_guard lock(g_mutex);
  handler()(message);
}

std::size_t warning_count() { return g_count.load(); }

}  // namespace irj

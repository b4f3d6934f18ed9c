#include "netcage/core/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace netcage::log {
namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;
}  // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

void warn(const std::string& msg) {
  if (g_level < Level::Warn) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "warning: " << msg << '\n';
}

void info(const std::string& msg) {
  if (g_level < Level::Info) return;
  std::lock_guard lock(g_mutex);
  std::cerr << msg << '\n';
}

}  // namespace netcage::log

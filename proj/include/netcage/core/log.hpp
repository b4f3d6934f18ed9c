#pragma once

#include <string>

namespace netcage::log {

enum class Level { Quiet = 0, Warn = 1, Info = 2 };

void set_level(Level level);
Level level();
void warn(const std::string& msg);
void info(const std::string& msg);

}  // namespace netcage::log

#pragma once

// Line-oriented audit log on stderr:
//   2026-10-15T12:00:00Z INFO step=screen corpus=Eng-NA/Bates file=amy.cha msg="..."

#include <string_view>

namespace chatharvest::log {

enum class Level { debug, info, warn, error, off };

void set_level(Level level);
Level level();

void write(Level level, std::string_view step, std::string_view corpus,
           std::string_view file, std::string_view message);

inline void info(std::string_view step, std::string_view corpus,
                 std::string_view file, std::string_view message) {
  write(Level::info, step, corpus, file, message);
}
inline void warn(std::string_view step, std::string_view corpus,
                 std::string_view file, std::string_view message) {
  write(Level::warn, step, corpus, file, message);
}
inline void error(std::string_view step, std::string_view corpus,
                  std::string_view file, std::string_view message) {
  write(Level::error, step, corpus, file, message);
}

}  // namespace chatharvest::log

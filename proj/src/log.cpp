#include "chatharvest/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

#include "chatharvest/manifest.hpp"

namespace chatharvest::log {

namespace {

std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

std::string_view name(Level level) {
  switch (level) {
    case Level::debug: return "DEBUG";
    case Level::info: return "INFO";
    case Level::warn: return "WARN";
    case Level::error: return "ERROR";
    case Level::off: break;
  }
  return "";
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void write(Level lvl, std::string_view step, std::string_view corpus,
           std::string_view file, std::string_view message) {
  if (lvl < g_level.load() || g_level.load() == Level::off) return;
  std::string line = utc_timestamp();
  line += ' ';
  line += name(lvl);
  line += " step=";
  line += step;
  if (!corpus.empty()) line += " corpus=" + std::string(corpus);
  if (!file.empty()) line += " file=" + std::string(file);
  line += " msg=" + quoted(message);
  line += '\n';
  std::lock_guard lock(g_mutex);
  std::cerr << line;
}

}  // namespace chatharvest::log

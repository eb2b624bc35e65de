#include "chatharvest/manifest.hpp"

#include <json.hpp>

#include <ctime>
#include <fstream>
#include <sstream>

#include "chatharvest/errors.hpp"

namespace chatharvest {

using nlohmann::json;

Manifest Manifest::load(const std::filesystem::path& file) {
  Manifest m(file);
  std::ifstream in(file, std::ios::binary);
  if (!in) return m;
  try {
    auto doc = json::parse(in);
    for (const auto& [key, e] : doc.at("entries").items()) {
      ManifestEntry entry;
      entry.archive_url = e.at("archive_url").get<std::string>();
      entry.digest = e.at("sha256").get<std::string>();
      entry.byte_size = e.at("byte_size").get<std::uint64_t>();
      entry.extraction_root = e.at("extraction_root").get<std::string>();
      entry.timestamp = e.at("timestamp").get<std::string>();
      entry.file_count = e.at("file_count").get<std::uint64_t>();
      m.entries_.emplace(key, std::move(entry));
    }
  } catch (const json::exception& err) {
    throw ConfigError("cannot read manifest " + file.string() + ": " + err.what());
  }
  return m;
}

std::string Manifest::key(const std::string& dataset, const std::string& corpus) {
  return dataset + "/" + corpus;
}

std::optional<ManifestEntry> Manifest::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Manifest::put(const std::string& key, ManifestEntry entry) {
  std::lock_guard lock(mutex_);
  entries_[key] = std::move(entry);
}

std::map<std::string, ManifestEntry> Manifest::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::string Manifest::to_json() const {
  json doc;
  doc["entries"] = json::object();
  for (const auto& [key, e] : entries()) {
    doc["entries"][key] = {{"archive_url", e.archive_url},
                           {"sha256", e.digest},
                           {"byte_size", e.byte_size},
                           {"extraction_root", e.extraction_root},
                           {"timestamp", e.timestamp},
                           {"file_count", e.file_count}};
  }
  return doc.dump(2) + "\n";
}

void Manifest::save() const {
  if (file_.empty()) return;
  std::lock_guard lock(save_mutex_);
  auto text = to_json();
  std::filesystem::create_directories(file_.parent_path());
  auto tmp = file_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write manifest " + tmp.string());
  }
  std::filesystem::rename(tmp, file_);
}

std::string utc_timestamp() {
  auto now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace chatharvest

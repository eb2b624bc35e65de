#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace chatharvest {

struct ManifestEntry {
  std::string archive_url;
  std::string digest;  // sha256 hex of the archive bytes
  std::uint64_t byte_size = 0;
  std::string extraction_root;  // '/'-separated, relative to the mirror root
  std::string timestamp;        // UTC, ISO 8601
  std::uint64_t file_count = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Record of fetched archives, keyed by "<dataset>/<corpus>" and persisted as
/// JSON with sorted keys. All members are safe to call concurrently.
class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::filesystem::path file) : file_(std::move(file)) {}

  // Moves are not synchronized; only move a manifest nobody else is using.
  Manifest(Manifest&& other) noexcept
      : file_(std::move(other.file_)), entries_(std::move(other.entries_)) {}
  Manifest& operator=(Manifest&& other) noexcept {
    file_ = std::move(other.file_);
    entries_ = std::move(other.entries_);
    return *this;
  }

  /// Reads `file` if it exists; an absent file gives an empty manifest bound
  /// to that path. Throws ConfigError on unparsable content.
  static Manifest load(const std::filesystem::path& file);

  static std::string key(const std::string& dataset, const std::string& corpus);

  std::optional<ManifestEntry> get(const std::string& key) const;
  void put(const std::string& key, ManifestEntry entry);
  std::map<std::string, ManifestEntry> entries() const;

  std::string to_json() const;
  /// Writes to the bound path (no-op when unbound), via a temp file + rename.
  void save() const;

  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  mutable std::mutex save_mutex_;
  std::map<std::string, ManifestEntry> entries_;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace chatharvest

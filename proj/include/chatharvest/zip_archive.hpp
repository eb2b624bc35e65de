#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chatharvest {

struct ZipEntry {
  std::string name;  // as stored, '/' separated
  std::uint16_t method = 0;
  std::uint16_t flags = 0;
  std::uint32_t crc32 = 0;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint64_t local_header_offset = 0;

  bool is_directory() const { return !name.empty() && name.back() == '/'; }
};

/// Read-only view of an in-memory zip archive.
///
/// The central directory is parsed on construction (ArchiveError when it is
/// missing or inconsistent); entry data is only decompressed on read(), so
/// callers can walk entries in central-directory order and stop early.
/// Supports stored and deflated entries and zip64 sizes/offsets.
class ZipArchive {
 public:
  explicit ZipArchive(std::string bytes);

  const std::vector<ZipEntry>& entries() const { return entries_; }

  /// Decompressed contents; verifies size and CRC-32. Throws ArchiveError.
  std::string read(const ZipEntry& entry) const;

 private:
  std::string bytes_;
  std::vector<ZipEntry> entries_;
};

/// Relative, normalized form of an entry name that is safe to extract, or
/// an empty string when the name escapes the destination (absolute path,
/// drive letter, `..` component, backslash tricks).
std::string safe_entry_path(std::string_view name);

}  // namespace chatharvest

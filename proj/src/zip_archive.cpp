#include "chatharvest/zip_archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>

#include "chatharvest/errors.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::uint32_t kZip64EndSig = 0x06064b50;
constexpr std::uint32_t kZip64LocatorSig = 0x07064b50;
constexpr std::uint64_t kMaxEntrySize = std::uint64_t{1} << 31;

class Reader {
 public:
  Reader(std::string_view data, std::uint64_t offset) : data_(data), pos_(offset) {
    if (offset > data.size()) throw ArchiveError("offset beyond end of archive");
  }

  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }

  std::string_view bytes(std::uint64_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(std::uint64_t n) { need(n), pos_ += n; }
  std::uint64_t pos() const { return pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) throw ArchiveError("truncated archive");
  }

  std::uint64_t le(int n) {
    need(static_cast<std::uint64_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += static_cast<std::uint64_t>(n);
    return v;
  }

  std::string_view data_;
  std::uint64_t pos_;
};

struct Directory {
  std::uint64_t count = 0;
  std::uint64_t size = 0;
  std::uint64_t offset = 0;
};

Directory find_directory(std::string_view data) {
  if (data.size() < 22) throw ArchiveError("not a zip archive (too short)");
  // EOCD is at most 22 + 65535 bytes from the end
  auto lowest = data.size() > 22 + 0xFFFF ? data.size() - 22 - 0xFFFF : 0;
  for (auto pos = data.size() - 22 + 1; pos-- > lowest;) {
    Reader r(data, pos);
    if (r.u32() != kEndOfCentralDirSig) continue;
    Directory dir;
    r.skip(4);  // disk numbers
    r.skip(2);
    dir.count = r.u16();
    dir.size = r.u32();
    dir.offset = r.u32();
    auto comment_len = r.u16();
    if (pos + 22 + comment_len != data.size()) continue;  // signature inside comment

    bool zip64 = dir.count == 0xFFFF || dir.size == 0xFFFFFFFF ||
                 dir.offset == 0xFFFFFFFF;
    if (zip64 && pos >= 20) {
      Reader loc(data, pos - 20);
      if (loc.u32() == kZip64LocatorSig) {
        loc.skip(4);
        auto end64 = loc.u64();
        Reader e(data, end64);
        if (e.u32() != kZip64EndSig) throw ArchiveError("bad zip64 end record");
        e.skip(8 + 2 + 2 + 4 + 4 + 8);
        dir.count = e.u64();
        dir.size = e.u64();
        dir.offset = e.u64();
      }
    }
    if (dir.offset > data.size() || dir.size > data.size() - dir.offset) {
      throw ArchiveError("central directory outside archive");
    }
    return dir;
  }
  throw ArchiveError("not a zip archive (no end of central directory)");
}

void apply_zip64_extra(std::string_view extra, ZipEntry& e,
                       std::uint32_t raw_csize, std::uint32_t raw_usize,
                       std::uint32_t raw_offset) {
  Reader r(extra, 0);
  while (r.pos() + 4 <= extra.size()) {
    auto id = r.u16();
    auto len = r.u16();
    auto body = r.bytes(len);
    if (id != 0x0001) continue;
    Reader z(body, 0);
    if (raw_usize == 0xFFFFFFFF) e.uncompressed_size = z.u64();
    if (raw_csize == 0xFFFFFFFF) e.compressed_size = z.u64();
    if (raw_offset == 0xFFFFFFFF) e.local_header_offset = z.u64();
  }
}

std::string inflate_raw(std::string_view in, std::uint64_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ArchiveError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    throw ArchiveError(rc == Z_BUF_ERROR ? "entry larger than declared size"
                                         : "corrupt deflate stream");
  }
  if (produced != expected) throw ArchiveError("entry size mismatch");
  return out;
}

}  // namespace

ZipArchive::ZipArchive(std::string bytes) : bytes_(std::move(bytes)) {
  std::string_view data = bytes_;
  auto dir = find_directory(data);
  Reader r(data, dir.offset);
  for (std::uint64_t i = 0; i < dir.count; ++i) {
    if (r.u32() != kCentralHeaderSig) {
      throw ArchiveError("bad central directory header");
    }
    ZipEntry e;
    r.skip(4);  // versions
    e.flags = r.u16();
    e.method = r.u16();
    r.skip(4);  // time, date
    e.crc32 = r.u32();
    auto csize = r.u32();
    auto usize = r.u32();
    auto name_len = r.u16();
    auto extra_len = r.u16();
    auto comment_len = r.u16();
    r.skip(2 + 2 + 4);  // disk, internal attrs, external attrs
    auto offset = r.u32();
    e.name = std::string(r.bytes(name_len));
    auto extra = r.bytes(extra_len);
    r.skip(comment_len);
    e.compressed_size = csize;
    e.uncompressed_size = usize;
    e.local_header_offset = offset;
    apply_zip64_extra(extra, e, csize, usize, offset);
    entries_.push_back(std::move(e));
  }
}

std::string ZipArchive::read(const ZipEntry& entry) const {
  std::string_view data = bytes_;
  if (entry.flags & 0x1) throw ArchiveError("encrypted entry: " + entry.name);
  if (entry.uncompressed_size > kMaxEntrySize) {
    throw ArchiveError("entry too large: " + entry.name);
  }
  Reader r(data, entry.local_header_offset);
  if (r.u32() != kLocalHeaderSig) {
    throw ArchiveError("bad local header for " + entry.name);
  }
  r.skip(22);
  auto name_len = r.u16();
  auto extra_len = r.u16();
  r.skip(static_cast<std::uint64_t>(name_len) + extra_len);
  auto payload = r.bytes(entry.compressed_size);

  std::string out;
  switch (entry.method) {
    case 0:
      if (entry.compressed_size != entry.uncompressed_size) {
        throw ArchiveError("stored entry size mismatch: " + entry.name);
      }
      out = std::string(payload);
      break;
    case 8:
      out = inflate_raw(payload, entry.uncompressed_size);
      break;
    default:
      throw ArchiveError("unsupported compression method " +
                         std::to_string(entry.method) + ": " + entry.name);
  }

  auto crc = ::crc32(0L, Z_NULL, 0);
  std::string_view view = out;
  while (!view.empty()) {
    auto chunk = std::min<std::size_t>(view.size(), std::numeric_limits<uInt>::max());
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(view.data()),
                  static_cast<uInt>(chunk));
    view.remove_prefix(chunk);
  }
  if (crc != entry.crc32) throw ArchiveError("CRC mismatch: " + entry.name);
  return out;
}

std::string safe_entry_path(std::string_view name) {
  if (name.empty() || name.front() == '/' || name.front() == '\\') return {};
  if (name.size() >= 2 && name[1] == ':') return {};  // C:foo
  if (name.find('\0') != std::string_view::npos) return {};
  std::string out;
  for (auto seg : text::split(name, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == ".." || seg.find('\\') != std::string_view::npos) return {};
    if (!out.empty()) out += '/';
    out += seg;
  }
  return out;
}

}  // namespace chatharvest

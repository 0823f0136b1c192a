#pragma once

// Minimal ZIP archive reader: stored and deflated entries, no ZIP64.

#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <string_view>

#include <zlib.h>

#include "tabrml/error.hpp"

namespace tabrml::detail {

inline std::uint32_t le16(std::string_view s, std::size_t at) {
  if (at + 2 > s.size()) throw IngestError("zip: truncated archive");
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + 1])) << 8;
}

inline std::uint32_t le32(std::string_view s, std::size_t at) { return le16(s, at) | le16(s, at + 2) << 16; }

class ZipArchive {
 public:
  struct Entry {
    std::uint16_t flags = 0;
    std::uint16_t method = 0;
    std::uint32_t crc = 0;
    std::uint32_t compressed = 0;
    std::uint32_t size = 0;
    std::uint32_t local_offset = 0;
  };

  explicit ZipArchive(std::string_view data) : data_(data) {
    if (data.size() < 22) throw IngestError("zip: file too small to be an archive");
    // End of central directory record, possibly followed by a comment.
    std::size_t eocd = std::string_view::npos;
    std::size_t lowest = data.size() >= 22 + 0xFFFF ? data.size() - 22 - 0xFFFF : 0;
    for (std::size_t i = data.size() - 22 + 1; i-- > lowest;) {
      if (le32(data, i) == 0x06054b50) {
        eocd = i;
        break;
      }
    }
    if (eocd == std::string_view::npos) throw IngestError("zip: end of central directory not found");
    std::uint32_t count = le16(data, eocd + 10);
    std::uint32_t cd_size = le32(data, eocd + 12);
    std::uint32_t cd_offset = le32(data, eocd + 16);
    if (cd_offset == 0xFFFFFFFFu || count == 0xFFFF) throw IngestError("zip: ZIP64 archives are not supported");
    if (std::size_t{cd_offset} + cd_size > data.size()) throw IngestError("zip: central directory out of range");

    std::size_t p = cd_offset;
    for (std::uint32_t k = 0; k < count; ++k) {
      if (le32(data, p) != 0x02014b50) throw IngestError("zip: bad central directory entry");
      Entry e;
      e.flags = static_cast<std::uint16_t>(le16(data, p + 8));
      e.method = static_cast<std::uint16_t>(le16(data, p + 10));
      e.crc = le32(data, p + 16);
      e.compressed = le32(data, p + 20);
      e.size = le32(data, p + 24);
      std::uint32_t name_len = le16(data, p + 28);
      std::uint32_t extra_len = le16(data, p + 30);
      std::uint32_t comment_len = le16(data, p + 32);
      e.local_offset = le32(data, p + 42);
      if (p + 46 + name_len > data.size()) throw IngestError("zip: truncated entry name");
      entries_.emplace(std::string(data.substr(p + 46, name_len)), e);
      p += 46 + name_len + extra_len + comment_len;
    }
  }

  bool contains(const std::string& name) const { return entries_.contains(name); }

  std::string read(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw IngestError("zip: missing part '" + name + "'");
    const Entry& e = it->second;
    if (e.flags & 0x1) throw UnsupportedError("workbook is encrypted (password-protected)");
    std::size_t p = e.local_offset;
    if (le32(data_, p) != 0x04034b50) throw IngestError("zip: bad local header for '" + name + "'");
    std::size_t start = p + 30 + le16(data_, p + 26) + le16(data_, p + 28);
    if (start + e.compressed > data_.size()) throw IngestError("zip: data of '" + name + "' out of range");
    std::string_view raw = data_.substr(start, e.compressed);

    std::string out;
    if (e.method == 0) {
      out.assign(raw);
    } else if (e.method == 8) {
      out.resize(e.size);
      z_stream z{};
      if (inflateInit2(&z, -MAX_WBITS) != Z_OK) throw IngestError("zip: inflate init failed");
      z.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
      z.avail_in = static_cast<uInt>(raw.size());
      z.next_out = reinterpret_cast<Bytef*>(out.data());
      z.avail_out = static_cast<uInt>(out.size());
      int rc = inflate(&z, Z_FINISH);
      std::size_t produced = z.total_out;
      inflateEnd(&z);
      if (rc != Z_STREAM_END || produced != e.size) throw IngestError("zip: corrupt deflate data in '" + name + "'");
    } else {
      throw IngestError("zip: unsupported compression method " + std::to_string(e.method) + " in '" + name + "'");
    }
    auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size()));
    if (crc != e.crc) throw IngestError("zip: checksum mismatch in '" + name + "'");
    return out;
  }

 private:
  std::string_view data_;
  std::map<std::string, Entry> entries_;
};

}  // namespace tabrml::detail

#pragma once

// Minimal reader for the zip archives ICDAR submissions ship in: stored and
// deflated entries, no ZIP64, no encryption.

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "tedeval/error.hpp"

namespace tedeval::detail {

struct ZipEntry {
  std::string name;
  std::string data;
};

inline std::uint32_t read_u32(const std::string& buf, std::size_t at) {
  if (at + 4 > buf.size()) throw IoError("zip: truncated archive");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(buf[at + i]);
  return v;
}

inline std::uint16_t read_u16(const std::string& buf, std::size_t at) {
  if (at + 2 > buf.size()) throw IoError("zip: truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(buf[at]) |
                                    (static_cast<unsigned char>(buf[at + 1]) << 8));
}

inline std::string inflate_raw(const char* src, std::size_t src_size, std::size_t out_size) {
  std::string out(out_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw IoError("zip: inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(src));
  zs.avail_in = static_cast<uInt>(src_size);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != out_size) throw IoError("zip: corrupt deflate stream");
  return out;
}

inline std::vector<ZipEntry> read_zip_bytes(const std::string& buf, const std::string& label) {
  constexpr std::uint32_t kEocd = 0x06054b50;
  constexpr std::uint32_t kCentral = 0x02014b50;
  constexpr std::uint32_t kLocal = 0x04034b50;
  if (buf.size() < 22) throw IoError(label + ": not a zip archive");

  std::size_t eocd = std::string::npos;
  const std::size_t lowest = buf.size() > 22 + 0xFFFF ? buf.size() - 22 - 0xFFFF : 0;
  for (std::size_t at = buf.size() - 22 + 1; at-- > lowest;) {
    if (read_u32(buf, at) == kEocd) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string::npos) throw IoError(label + ": not a zip archive");

  const std::size_t count = read_u16(buf, eocd + 10);
  std::size_t at = read_u32(buf, eocd + 16);
  std::vector<ZipEntry> entries;
  for (std::size_t n = 0; n < count; ++n) {
    if (read_u32(buf, at) != kCentral) throw IoError(label + ": bad central directory");
    const auto flags = read_u16(buf, at + 8);
    const auto method = read_u16(buf, at + 10);
    const auto crc = read_u32(buf, at + 16);
    const std::size_t packed = read_u32(buf, at + 20);
    const std::size_t unpacked = read_u32(buf, at + 24);
    const std::size_t name_len = read_u16(buf, at + 28);
    const std::size_t extra_len = read_u16(buf, at + 30);
    const std::size_t comment_len = read_u16(buf, at + 32);
    const std::size_t local = read_u32(buf, at + 42);
    if (at + 46 + name_len > buf.size()) throw IoError(label + ": truncated archive");
    std::string name = buf.substr(at + 46, name_len);
    at += 46 + name_len + extra_len + comment_len;

    if (!name.empty() && name.back() == '/') continue;
    if (flags & 0x1) throw IoError(label + ": encrypted entry " + name);
    if (packed == 0xFFFFFFFF || unpacked == 0xFFFFFFFF || local == 0xFFFFFFFF) {
      throw IoError(label + ": ZIP64 archives are not supported");
    }
    if (read_u32(buf, local) != kLocal) throw IoError(label + ": bad local header for " + name);
    const std::size_t data_at = local + 30 + read_u16(buf, local + 26) + read_u16(buf, local + 28);
    if (data_at + packed > buf.size()) throw IoError(label + ": truncated entry " + name);

    std::string data;
    if (method == 0) {
      data = buf.substr(data_at, packed);
    } else if (method == 8) {
      data = inflate_raw(buf.data() + data_at, packed, unpacked);
    } else {
      throw IoError(label + ": unsupported compression method for " + name);
    }
    const auto actual = crc32(0L, reinterpret_cast<const Bytef*>(data.data()),
                              static_cast<uInt>(data.size()));
    if (actual != crc) throw IoError(label + ": checksum mismatch for " + name);
    entries.push_back({std::move(name), std::move(data)});
  }
  return entries;
}

inline std::vector<ZipEntry> read_zip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_zip_bytes(buf, path.string());
}

}  // namespace tedeval::detail

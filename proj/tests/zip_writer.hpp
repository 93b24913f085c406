#pragma once

// Writes small zip archives for tests: stored or raw-deflated entries.

#include <zlib.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tedeval::test {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::string deflate_raw(const std::string& data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) !=
      Z_OK) {
    throw std::runtime_error("deflateInit2 failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

inline void write_zip(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& files,
                      bool compress = true) {
  std::string body;
  std::string central;
  for (const auto& [name, data] : files) {
    const std::string packed = compress ? deflate_raw(data) : data;
    const std::uint16_t method = compress ? 8 : 0;
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
    const auto offset = static_cast<std::uint32_t>(body.size());

    put_u32(body, 0x04034b50);
    put_u16(body, 20);
    put_u16(body, 0);
    put_u16(body, method);
    put_u16(body, 0);
    put_u16(body, 0);
    put_u32(body, crc);
    put_u32(body, static_cast<std::uint32_t>(packed.size()));
    put_u32(body, static_cast<std::uint32_t>(data.size()));
    put_u16(body, static_cast<std::uint16_t>(name.size()));
    put_u16(body, 0);
    body += name;
    body += packed;

    put_u32(central, 0x02014b50);
    put_u16(central, 20);
    put_u16(central, 20);
    put_u16(central, 0);
    put_u16(central, method);
    put_u16(central, 0);
    put_u16(central, 0);
    put_u32(central, crc);
    put_u32(central, static_cast<std::uint32_t>(packed.size()));
    put_u32(central, static_cast<std::uint32_t>(data.size()));
    put_u16(central, static_cast<std::uint16_t>(name.size()));
    put_u16(central, 0);
    put_u16(central, 0);
    put_u16(central, 0);
    put_u16(central, 0);
    put_u32(central, 0);
    put_u32(central, offset);
    central += name;
  }
  std::string out = body + central;
  put_u32(out, 0x06054b50);
  put_u16(out, 0);
  put_u16(out, 0);
  put_u16(out, static_cast<std::uint16_t>(files.size()));
  put_u16(out, static_cast<std::uint16_t>(files.size()));
  put_u32(out, static_cast<std::uint32_t>(central.size()));
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  put_u16(out, 0);
  std::ofstream(path, std::ios::binary) << out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tedeval_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tedeval::test

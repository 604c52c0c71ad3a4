#include "bugchat/ingest/zip.hpp"

#include <zlib.h>

#include <cstdint>
#include <cstring>

#include "bugchat/errors.hpp"

namespace bugchat::ingest {
namespace {

constexpr std::uint32_t kLocalHeader = 0x04034b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kEndOfCentral = 0x06054b50;

std::uint32_t read_u32(std::string_view b, std::size_t at) {
  if (at + 4 > b.size()) throw ParseError("truncated ZIP archive", b.size());
  auto u = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + i])); };
  return u(0) | u(1) << 8 | u(2) << 16 | u(3) << 24;
}

std::uint16_t read_u16(std::string_view b, std::size_t at) {
  if (at + 2 > b.size()) throw ParseError("truncated ZIP archive", b.size());
  auto u = [&](std::size_t i) { return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at + i])); };
  return static_cast<std::uint16_t>(u(0) | u(1) << 8);
}

void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t crc_of(std::string_view data) {
  return static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

std::string inflate_raw(std::string_view in, std::size_t expected, std::size_t at) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(ErrorKind::kIo, "inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw ParseError("corrupt deflate data in ZIP entry", at);
  }
  return out;
}

std::string deflate_raw(std::string_view in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorKind::kIo, "deflateInit failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(in.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::kIo, "deflate failed");
  return out;
}

}  // namespace

bool is_safe_entry_name(std::string_view name) {
  if (name.empty() || name.front() == '/' || name.find('\\') != std::string_view::npos ||
      name.find(':') != std::string_view::npos) {
    return false;
  }
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find('/', start);
    if (end == std::string_view::npos) end = name.size();
    auto segment = name.substr(start, end - start);
    bool trailing = end == name.size();
    if ((segment.empty() && !trailing) || segment == "." || segment == "..") return false;
    start = end + 1;
  }
  return true;
}

std::vector<ZipEntry> read_zip(std::string_view b, std::size_t max_total_size) {
  if (b.size() < 22) throw ParseError("not a ZIP archive", 0);
  std::size_t eocd = std::string_view::npos;
  std::size_t lowest = b.size() > 22 + 0xFFFF ? b.size() - 22 - 0xFFFF : 0;
  for (std::size_t i = b.size() - 22 + 1; i-- > lowest;) {
    if (read_u32(b, i) == kEndOfCentral) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw ParseError("not a ZIP archive", 0);

  std::uint16_t count = read_u16(b, eocd + 10);
  std::size_t cd = read_u32(b, eocd + 16);
  std::vector<ZipEntry> entries;
  std::size_t total = 0;
  for (std::uint16_t n = 0; n < count; ++n) {
    if (read_u32(b, cd) != kCentralHeader) throw ParseError("bad central directory", cd);
    std::uint16_t flags = read_u16(b, cd + 8);
    std::uint16_t method = read_u16(b, cd + 10);
    std::uint32_t crc = read_u32(b, cd + 16);
    std::size_t csize = read_u32(b, cd + 20);
    std::size_t usize = read_u32(b, cd + 24);
    std::uint16_t name_len = read_u16(b, cd + 28);
    std::uint16_t extra_len = read_u16(b, cd + 30);
    std::uint16_t comment_len = read_u16(b, cd + 32);
    std::size_t local = read_u32(b, cd + 42);
    if (cd + 46 + name_len > b.size()) throw ParseError("truncated ZIP archive", cd);
    std::string name(b.substr(cd + 46, name_len));
    cd += 46 + name_len + extra_len + comment_len;

    if (csize == 0xFFFFFFFF || usize == 0xFFFFFFFF || local == 0xFFFFFFFF) {
      throw ParseError("ZIP64 archives are not supported", cd);
    }
    if (!is_safe_entry_name(name)) {
      throw ValidationError("unsafe path in ZIP: " + name, name);
    }
    if (name.back() == '/') continue;
    if (flags & 0x1) throw ValidationError("encrypted ZIP entry: " + name, name);
    total += usize;
    if (total > max_total_size) {
      throw ValidationError("ZIP expands beyond the size limit", name);
    }

    if (read_u32(b, local) != kLocalHeader) throw ParseError("bad local header", local);
    std::size_t data_at = local + 30 + read_u16(b, local + 26) + read_u16(b, local + 28);
    if (data_at + csize > b.size()) throw ParseError("truncated ZIP entry " + name, local);
    auto raw = b.substr(data_at, csize);

    ZipEntry entry{std::move(name), {}};
    if (method == 0) {
      if (csize != usize) throw ParseError("bad stored entry size", local);
      entry.data = std::string(raw);
    } else if (method == 8) {
      entry.data = inflate_raw(raw, usize, data_at);
    } else {
      throw ParseError("unsupported compression method " + std::to_string(method), local);
    }
    if (crc_of(entry.data) != crc) throw ParseError("CRC mismatch in " + entry.name, local);
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string write_zip(const std::vector<ZipEntry>& entries) {
  std::string out;
  std::string central;
  for (const auto& e : entries) {
    auto compressed = deflate_raw(e.data);
    bool stored = compressed.size() >= e.data.size();
    const std::string& body = stored ? e.data : compressed;
    std::uint32_t crc = crc_of(e.data);
    std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    std::uint16_t method = stored ? 0 : 8;

    put_u32(out, kLocalHeader);
    put_u16(out, 20);
    put_u16(out, 0x0800);  // UTF-8 names
    put_u16(out, method);
    put_u16(out, 0);
    put_u16(out, 0x21);  // 1980-01-01
    put_u32(out, crc);
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(e.data.size()));
    put_u16(out, static_cast<std::uint16_t>(e.name.size()));
    put_u16(out, 0);
    out += e.name;
    out += body;

    put_u32(central, kCentralHeader);
    put_u16(central, 20);
    put_u16(central, 20);
    put_u16(central, 0x0800);
    put_u16(central, method);
    put_u16(central, 0);
    put_u16(central, 0x21);
    put_u32(central, crc);
    put_u32(central, static_cast<std::uint32_t>(body.size()));
    put_u32(central, static_cast<std::uint32_t>(e.data.size()));
    put_u16(central, static_cast<std::uint16_t>(e.name.size()));
    put_u16(central, 0);
    put_u16(central, 0);
    put_u16(central, 0);
    put_u16(central, 0);
    put_u32(central, 0);
    put_u32(central, offset);
    central += e.name;
  }
  std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put_u32(out, kEndOfCentral);
  put_u16(out, 0);
  put_u16(out, 0);
  put_u16(out, static_cast<std::uint16_t>(entries.size()));
  put_u16(out, static_cast<std::uint16_t>(entries.size()));
  put_u32(out, static_cast<std::uint32_t>(central.size()));
  put_u32(out, cd_offset);
  put_u16(out, 0);
  return out;
}

}  // namespace bugchat::ingest

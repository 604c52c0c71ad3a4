#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bugchat::ingest {

struct ZipEntry {
  std::string name;
  std::string data;
};

/// Reads a ZIP archive held in memory. Stored and deflated entries are
/// supported; directory entries are skipped. Raises ParseError for
/// corrupt archives and ValidationError for unsafe entry names or
/// archives that would expand beyond `max_total_size`.
std::vector<ZipEntry> read_zip(std::string_view bytes,
                               std::size_t max_total_size = 512u << 20);

/// Writes a deflate-compressed archive.
std::string write_zip(const std::vector<ZipEntry>& entries);

/// True for relative, non-empty paths without "..", "." or empty segments.
bool is_safe_entry_name(std::string_view name);

}  // namespace bugchat::ingest

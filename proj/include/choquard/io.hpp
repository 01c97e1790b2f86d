#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "choquard/grid.hpp"

namespace choquard::io {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Little-endian float64 .npy in C order with the grid's node shape.
std::string encode_npy(const Field& field);
Field decode_npy(std::string_view bytes, DomainPtr domain);
Field read_field(const std::filesystem::path& path, DomainPtr domain);

/// CSV with leading '#' metadata lines, a header row and 17-digit numbers.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void comment(const std::string& line);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::string body_;
};

}  // namespace choquard::io

#include "choquard/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "choquard/errors.hpp"

namespace choquard::io {

std::string format_double(double v) {
  if (v == 0.0) return "0";
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(v));
  return buf.data();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create directory " + dir.string() + ": " + ec.message());
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

namespace {

static_assert(std::endian::native == std::endian::little, "npy I/O assumes a little-endian host");

std::string shape_text(const std::vector<int>& nodes) {
  std::string s = "(";
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    s += std::to_string(nodes[k]);
    s += (nodes.size() == 1 || k + 1 < nodes.size()) ? "," : "";
    if (k + 1 < nodes.size()) s += " ";
  }
  return s + ")";
}

}  // namespace

std::string encode_npy(const Field& field) {
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape_text(field.domain().nodes()) + ", }";
  const std::size_t base = 10;
  std::size_t total = base + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header += '\n';
  std::string out;
  out += "\x93NUMPY";
  out += static_cast<char>(1);
  out += static_cast<char>(0);
  const auto hl = static_cast<std::uint16_t>(header.size());
  out += static_cast<char>(hl & 0xff);
  out += static_cast<char>(hl >> 8);
  out += header;
  const auto& v = field.values();
  out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  return out;
}

Field decode_npy(std::string_view bytes, DomainPtr domain) {
  if (bytes.size() < 10 || bytes.substr(0, 6) != "\x93NUMPY") throw ConfigError("field file is not a .npy array");
  const int major = static_cast<unsigned char>(bytes[6]);
  std::size_t hl;
  std::size_t off;
  if (major == 1) {
    hl = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    off = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw ConfigError("truncated .npy header");
    hl = 0;
    for (int i = 0; i < 4; ++i) hl |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    off = 12;
  } else {
    throw ConfigError("unsupported .npy version");
  }
  if (bytes.size() < off + hl) throw ConfigError("truncated .npy header");
  const std::string header(bytes.substr(off, hl));
  if (header.find("'<f8'") == std::string::npos) throw ConfigError("field file must hold little-endian float64");
  if (header.find("'fortran_order': False") == std::string::npos) throw ConfigError("field file must be C ordered");
  std::smatch m;
  if (!std::regex_search(header, m, std::regex(R"('shape':\s*\(([^)]*)\))"))) throw ConfigError("field file has no shape");
  std::vector<int> shape;
  const std::string dims = m[1];
  std::regex num(R"(\d+)");
  for (auto it = std::sregex_iterator(dims.begin(), dims.end(), num); it != std::sregex_iterator(); ++it) {
    shape.push_back(std::stoi(it->str()));
  }
  if (shape != domain->nodes()) throw ConfigError("field file shape does not match the configured grid");
  const std::size_t n = domain->size();
  if (bytes.size() - off - hl != n * sizeof(double)) throw ConfigError("field file payload has the wrong size");
  std::vector<double> v(n);
  std::memcpy(v.data(), bytes.data() + off + hl, n * sizeof(double));
  for (double x : v) {
    if (!std::isfinite(x)) throw ConfigError("field file contains non-finite values");
  }
  Field f(domain, std::move(v));
  f.enforce_mask();
  return f;
}

Field read_field(const std::filesystem::path& path, DomainPtr domain) {
  return decode_npy(read_file(path), std::move(domain));
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::comment(const std::string& line) { comments_.push_back(line); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw ConfigError("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_double(values[i]);
  }
  body_ += '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw ConfigError("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

std::string CsvWriter::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  return out + body_;
}

}  // namespace choquard::io

// io.hpp — Deterministic artifact output: CSV tables at 12 significant digits,
// FNV-1a checksums and the JSON run manifest.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pairwave::io {

inline constexpr const char* tool_version = "pairwave 1.0.0";

// File-system failures; the message always names the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric table with key-value comment header. Rendered as
//   # key: value
//   col1,col2,...
//   <numbers at 12 significant digits>
struct Table {
  std::vector<std::pair<std::string, std::string>> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_sig(double x);  // 12 significant digits, locale-independent
std::string render_csv(const Table& table);
Table parse_csv(std::string_view bytes);  // inverse of render_csv at quoted precision

void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);  // fixed-width lowercase hex

struct OutputRecord {
  std::string file;      // name relative to the output directory
  std::string checksum;  // fnv1a64 of the file bytes
};

struct RunManifest {
  std::string scenario;
  std::string scenario_hash;
  std::string version = tool_version;
  double wall_time_s = 0.0;
  std::vector<OutputRecord> outputs;
};

std::string render_manifest(const RunManifest& m);  // JSON bytes
RunManifest parse_manifest(std::string_view bytes);

}  // namespace pairwave::io

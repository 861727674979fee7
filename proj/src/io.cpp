// io.cpp — CSV rendering/parsing, checksums and the run manifest.
#include "pairwave/io.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pairwave::io {

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(line.substr(start));
      return parts;
    }
    parts.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_sig(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string render_csv(const Table& table) {
  std::string out;
  for (const auto& [key, value] : table.comments)
    out += "# " + key + ": " + value + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out += (c ? "," : "") + table.columns[c];
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out += (c ? "," : "") + format_sig(row[c]);
    out += "\n";
  }
  return out;
}

Table parse_csv(std::string_view bytes) {
  Table table;
  std::size_t start = 0;
  bool header_seen = false;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = line.substr(line.starts_with("# ") ? 2 : 1);
      std::size_t sep = body.find(": ");
      if (sep == std::string_view::npos)
        table.comments.emplace_back(std::string(body), "");
      else
        table.comments.emplace_back(std::string(body.substr(0, sep)),
                                    std::string(body.substr(sep + 2)));
      continue;
    }
    if (!header_seen) {
      table.columns = split(line, ',');
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (const std::string& cell : split(line, ',')) {
      char* tail = nullptr;
      errno = 0;
      double v = std::strtod(cell.c_str(), &tail);
      if (tail == cell.c_str() || *tail != '\0')
        throw IoError("parse_csv: malformed numeric cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.columns.size())
      throw IoError("parse_csv: row width does not match the header");
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw IoError("parse_csv: missing header row");
  return table;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_file: cannot open '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write_file: short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read_file: read failure on '" + path + "'");
  return buf.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string render_manifest(const RunManifest& m) {
  nlohmann::json j;
  j["scenario"] = m.scenario;
  j["scenario_hash"] = m.scenario_hash;
  j["version"] = m.version;
  j["wall_time_s"] = m.wall_time_s;
  j["outputs"] = nlohmann::json::array();
  for (const auto& rec : m.outputs)
    j["outputs"].push_back({{"file", rec.file}, {"checksum", rec.checksum}});
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view bytes) {
  nlohmann::json j = nlohmann::json::parse(bytes);
  RunManifest m;
  m.scenario = j.at("scenario").get<std::string>();
  m.scenario_hash = j.at("scenario_hash").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.wall_time_s = j.at("wall_time_s").get<double>();
  for (const auto& rec : j.at("outputs"))
    m.outputs.push_back({rec.at("file").get<std::string>(), rec.at("checksum").get<std::string>()});
  return m;
}

}  // namespace pairwave::io

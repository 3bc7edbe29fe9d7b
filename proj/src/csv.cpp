#include "chaosgan/csv.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "chaosgan/error.hpp"

namespace chaosgan {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << row[i];
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string provenance_line(std::uint64_t config_hash) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# chaosgan %s config_hash=%016" PRIx64, kVersion, config_hash);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("csv: no column named '" + name + "'");
}

CsvTable parse_csv(std::istream& in, const std::string& source_name) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_fields(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ConfigError(source_name + ": empty csv (no header row)");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  return parse_csv(in, path.string());
}

CsvWriter::CsvWriter(std::vector<std::string> header, std::uint64_t config_hash)
    : header_(std::move(header)), hash_(config_hash) {}

void CsvWriter::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw ShapeError("csv writer: row has " + std::to_string(row.size()) + " fields, header has " +
                     std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::write(std::ostream& out) const {
  out << provenance_line(hash_) << '\n';
  write_row(out, header_);
  for (const auto& r : rows_) write_row(out, r);
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  write(out);
  if (!out) throw Error(path.string() + ": write failed");
}

}  // namespace chaosgan

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace chaosgan {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

/// `# chaosgan <version> config_hash=<16 hex digits>`
std::string provenance_line(std::uint64_t config_hash);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
};

/// Skips `#` comment lines; the first other line is the header. Every row must match its width.
CsvTable parse_csv(std::istream& in, const std::string& source_name = "csv");
CsvTable read_csv(const std::filesystem::path& path);

/// Collects rows and writes them behind the provenance line and header.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> header, std::uint64_t config_hash);

  void add(std::vector<std::string> row);
  std::size_t size() const noexcept { return rows_.size(); }
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::uint64_t hash_;
};

}  // namespace chaosgan

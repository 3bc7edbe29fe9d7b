#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace chaosgan {

/**
 * `key = value` lines grouped under `[section]` headers. Keys are addressed
 * as "section.key"; a key outside any section is an error. `#` and `;` start
 * comment lines.
 */
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& source_name = "config");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  std::vector<std::string> keys() const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list of non-negative integers.
  std::vector<std::size_t> get_sizes(const std::string& key,
                                     const std::vector<std::size_t>& fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  /// Canonical text: sections and keys sorted, one `key = value` per line.
  std::string to_string() const;
  /// FNV-1a of `to_string()`.
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace chaosgan

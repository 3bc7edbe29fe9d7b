#include "chaosgan/config_file.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "chaosgan/error.hpp"
#include "chaosgan/rng.hpp"

namespace chaosgan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError("config: key '" + key + "': expected " + what + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, const char* what) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) bad_value(key, value, what);
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source_name) {
  ConfigFile cfg;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const std::string where = source_name + ":" + std::to_string(line_no) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) throw ConfigError(where + "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside a [section]");
    const std::string full = section + "." + key;
    if (cfg.has(full)) throw ConfigError(where + "duplicate key '" + full + "'");
    cfg.values_[full] = trim(t.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse(in, path.string());
}

std::vector<std::string> ConfigFile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<std::int64_t>(key, it->second, "integer");
}

std::size_t ConfigFile::get_size(const std::string& key, std::size_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_number<std::size_t>(key, it->second, "non-negative integer");
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_number<std::uint64_t>(key, it->second, "non-negative integer");
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number<double>(key, it->second, "number");
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "boolean");
}

std::vector<std::size_t> ConfigFile::get_sizes(const std::string& key,
                                               const std::vector<std::size_t>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::size_t> out;
  for (const auto& item : split_list(it->second)) {
    out.push_back(parse_number<std::size_t>(key, item, "list of non-negative integers"));
  }
  return out;
}

std::vector<std::string> ConfigFile::get_list(const std::string& key,
                                              const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : split_list(it->second);
}

std::string ConfigFile::to_string() const {
  std::ostringstream out;
  std::string current;
  for (const auto& [full, value] : values_) {
    const auto dot = full.find('.');
    const std::string section = full.substr(0, dot);
    const std::string key = full.substr(dot + 1);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << key << " = " << value << '\n';
  }
  return out.str();
}

std::uint64_t ConfigFile::hash() const { return hash_label(to_string()); }

}  // namespace chaosgan

#include "gaplab/common/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gaplab/common/error.hpp"

namespace gaplab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      require(s.back() == ']' && s.size() > 2, "config: malformed section at " + where);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const std::size_t eq = s.find('=');
    require(eq != std::string::npos, "config: expected key=value at " + where);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    require(!key.empty(), "config: empty key at " + where);
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  require(cfg.has("meta.schema_version"),
          "config: missing meta.schema_version in " + origin);
  require(cfg.get_int("meta.schema_version") == kSchemaVersion,
          "config: unsupported schema_version in " + origin);
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_str(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), "config: missing key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key) const {
  const std::string s = get_str(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end && *end == '\0' && end != s.c_str(), "config: '" + key + "' is not a number: " + s);
  return v;
}

double Config::get_num(const std::string& key, double fallback) const {
  return has(key) ? get_num(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const std::string s = get_str(key);
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  require(end && *end == '\0' && end != s.c_str(), "config: '" + key + "' is not an integer: " + s);
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get_str(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error("config: '" + key + "' is not a boolean: " + s);
}

void Config::set_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0,
          "config override must look like section.key=value: " + assignment);
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace gaplab

#pragma once

#include <map>
#include <string>
#include <vector>

namespace gaplab {

/// Declarative experiment configuration.
///
/// File format: INI-style sections of `key = value` lines, `#` or `;`
/// comments, UTF-8. Keys are addressed as "section.key". The file must carry
/// `schema_version` in its `[meta]` section; readers reject unknown versions.
class Config {
 public:
  static constexpr int kSchemaVersion = 1;

  Config() = default;

  /// Parse from file. Throws Error with line number on malformed input.
  static Config load(const std::string& path);

  /// Parse from text (used by tests and CLI overrides).
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// "section.key=value" override, as accepted by the CLI --set flag.
  void set_override(const std::string& assignment);

  void set(const std::string& key, const std::string& value);

  /// Canonical "key=value\n" dump, keys sorted. Used for config hashing.
  std::string canonical() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gaplab

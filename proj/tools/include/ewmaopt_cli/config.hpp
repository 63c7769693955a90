#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ewmaopt::cli {

struct ConfigKey {
  const char* name;
  const char* default_value;
  const char* help;
  bool recorded;  ///< part of the provenance block
};

/// Every configurable key with its default. This is the single source of
/// defaults for the tool (mirrored in the README).
const std::vector<ConfigKey>& config_keys();

/// Resolved run configuration: defaults, then a config file, then flags.
///
/// Config files hold `key = value` lines. Lines starting with `#@` are read
/// the same way (so any CSV written by the tool can be fed back via
/// --config); other lines starting with `#` and lines without `=` are
/// ignored.
class RunConfig {
 public:
  RunConfig();

  void load_file(const std::string& path);
  void load_text(std::string_view text);

  /// Throws std::invalid_argument for unknown keys.
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] const std::string& get(const std::string& key) const;
  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] std::uint64_t count(const std::string& key) const;
  [[nodiscard]] bool is(const std::string& key, std::string_view value) const { return get(key) == value; }

  /// (key, value) pairs written into the provenance block, in table order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> provenance() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ewmaopt::cli

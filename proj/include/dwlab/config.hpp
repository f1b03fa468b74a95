// Flat key = value run configuration.
//
// Grammar: one `key = value` pair per line; '#' starts a comment anywhere on
// the line; blank lines are ignored; keys match [A-Za-z0-9_.-]+; values are
// the remaining text with surrounding whitespace stripped and must be
// non-empty; a key may appear at most once per file.
//
// Access is through typed getters that each take a default. A getter records
// the key as consumed and records the value that was actually used (parsed or
// default), so after a run has read its parameters
//   - unconsumed() lists file keys nothing asked for (i.e. typos), and
//   - canonical() serializes the fully resolved configuration, defaults
//     included, as sorted "key = value\n" lines - the block that gets hashed
//     into the run manifest.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwlab {

// Invalid syntax, a malformed value, or an unknown key. `field` names the
// offending key ("" for file-level syntax problems).
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& msg)
      : std::runtime_error(msg), field(std::move(field_)) {}
};

class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);  // throws ConfigError on I/O

  // Insert or override a pair programmatically (command-line overrides).
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Typed getters; absent key -> default, malformed value -> ConfigError.
  std::string get_string(const std::string& key, const std::string& def);
  double get_double(const std::string& key, double def);
  int get_int(const std::string& key, int def);
  std::uint64_t get_u64(const std::string& key, std::uint64_t def);

  // Keys present in the source that no getter has asked for.
  std::vector<std::string> unconsumed() const;

  // Sorted "key = value\n" lines of every resolved (consumed-or-defaulted)
  // parameter; doubles are rendered with %.17g.
  std::string canonical() const;

 private:
  const std::string* lookup(const std::string& key);

  std::map<std::string, std::string> entries_;    // raw pairs from the source
  std::set<std::string> consumed_;                // keys a getter touched
  std::map<std::string, std::string> resolved_;   // key -> value actually used
};

}  // namespace dwlab

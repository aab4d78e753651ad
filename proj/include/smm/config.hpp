#pragma once

// Small key=value configuration files for the driver executables.
//
// Format, one entry per line:
//
//     # comment
//     mesh_base    = 8        # trailing comments are allowed
//     method       = rt
//
// Keys and values are trimmed of surrounding whitespace.  Blank lines and
// comment-only lines are ignored.  Duplicate keys and malformed lines are
// reported as errors carrying the file name and line number.
//
// Readers fetch values through the typed getters; every getter marks its key
// as consumed.  After a driver has read everything it understands it calls
// unread_keys() and rejects the leftovers, so misspelled options fail loudly
// instead of being silently ignored.

#include <string>
#include <string_view>
#include <vector>

namespace smm {

class Config {
 public:
  Config() = default;

  /// Parse a configuration file from disk.  Throws std::runtime_error with a
  /// "file:line: message" prefix on any syntax problem.
  static Config parse_file(const std::string& path);

  /// Parse configuration text.  `name` is used as the file name in error
  /// messages.
  static Config parse_string(std::string_view text, const std::string& name = "<string>");

  bool has(std::string_view key) const;

  /// Insert or overwrite a value.  The entry is left unconsumed so a driver
  /// reads command-line overrides exactly like file entries.
  void set(std::string_view key, std::string_view value);

  // Required getters: throw std::runtime_error naming the key when absent or
  // when the value does not parse as the requested type.
  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  long long get_int(std::string_view key) const;
  bool get_bool(std::string_view key) const;

  // Defaulted getters: return the fallback when the key is absent.
  std::string get_string(std::string_view key, std::string_view fallback) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  /// Keys never touched by any getter, in insertion order.
  std::vector<std::string> unread_keys() const;

  /// Render the configuration as parseable text, one "key = value" line per
  /// entry in insertion order.  parse_string(emit()) reproduces the entries.
  std::string emit() const;

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string key;
    std::string value;
    mutable bool read = false;
  };

  const Entry* find(std::string_view key) const;

  std::vector<Entry> entries_;
};

}  // namespace smm

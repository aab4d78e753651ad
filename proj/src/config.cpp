#include "smm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smm {

namespace {

std::string_view trim(std::string_view s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void fail_at(const std::string& name, int line, const std::string& msg) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail_key(std::string_view key, const std::string& msg) {
  throw std::runtime_error("config key '" + std::string(key) + "': " + msg);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_string(text.str(), path);
}

Config Config::parse_string(std::string_view text, const std::string& name) {
  Config cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                           : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail_at(name, line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail_at(name, line_no, "empty key");
    if (key.find_first_of(" \t") != std::string_view::npos)
      fail_at(name, line_no, "key contains whitespace");
    if (cfg.has(key))
      fail_at(name, line_no, "duplicate key '" + std::string(key) + "'");
    cfg.entries_.push_back({std::string(key), std::string(value), false});
  }
  return cfg;
}

const Config::Entry* Config::find(std::string_view key) const {
  for (const Entry& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(std::string_view key) const { return find(key) != nullptr; }

void Config::set(std::string_view key, std::string_view value) {
  for (Entry& e : entries_) {
    if (e.key == key) {
      e.value = std::string(value);
      e.read = false;
      return;
    }
  }
  entries_.push_back({std::string(key), std::string(value), false});
}

std::string Config::get_string(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) fail_key(key, "required but missing");
  e->read = true;
  return e->value;
}

double Config::get_double(std::string_view key) const {
  const std::string raw = get_string(key);
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *trim(std::string_view(end)).data() != '\0')
    fail_key(key, "'" + raw + "' is not a number");
  return v;
}

long long Config::get_int(std::string_view key) const {
  const std::string raw = get_string(key);
  const char* begin = raw.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *trim(std::string_view(end)).data() != '\0')
    fail_key(key, "'" + raw + "' is not an integer");
  return v;
}

bool Config::get_bool(std::string_view key) const {
  const std::string raw = lower(get_string(key));
  if (raw == "true" || raw == "on" || raw == "yes" || raw == "1") return true;
  if (raw == "false" || raw == "off" || raw == "no" || raw == "0") return false;
  fail_key(key, "'" + raw + "' is not a boolean (use on/off, true/false, yes/no, 1/0)");
}

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
  return has(key) ? get_string(key) : std::string(fallback);
}

double Config::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(std::string_view key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::string> Config::unread_keys() const {
  std::vector<std::string> out;
  for (const Entry& e : entries_)
    if (!e.read) out.push_back(e.key);
  return out;
}

std::string Config::emit() const {
  std::ostringstream out;
  for (const Entry& e : entries_) out << e.key << " = " << e.value << "\n";
  return out.str();
}

}  // namespace smm

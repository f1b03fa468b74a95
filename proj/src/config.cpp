#include "dwlab/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace dwlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) +
                                ": expected `key = value`, got `" + line + "`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError(key, "line " + std::to_string(lineno) +
                                 ": key must match [A-Za-z0-9_.-]+");
    if (value.empty())
      throw ConfigError(key, "line " + std::to_string(lineno) +
                                 ": empty value for key `" + key + "`");
    if (!c.entries_.emplace(key, value).second)
      throw ConfigError(key, "line " + std::to_string(lineno) +
                                 ": duplicate key `" + key + "`");
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key))
    throw ConfigError(key, "key must match [A-Za-z0-9_.-]+");
  entries_[key] = value;
}

const std::string* Config::lookup(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& def) {
  const std::string* raw = lookup(key);
  const std::string v = raw ? *raw : def;
  resolved_[key] = v;
  return v;
}

double Config::get_double(const std::string& key, double def) {
  double v = def;
  if (const std::string* raw = lookup(key)) {
    errno = 0;
    char* end = nullptr;
    v = std::strtod(raw->c_str(), &end);
    if (end != raw->c_str() + raw->size() || raw->empty() || errno == ERANGE)
      throw ConfigError(key, "key `" + key + "`: not a number: " + *raw);
  }
  resolved_[key] = fmt_double(v);
  return v;
}

int Config::get_int(const std::string& key, int def) {
  long long v = def;
  if (const std::string* raw = lookup(key)) {
    errno = 0;
    char* end = nullptr;
    v = std::strtoll(raw->c_str(), &end, 10);
    if (end != raw->c_str() + raw->size() || raw->empty() || errno == ERANGE ||
        v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max())
      throw ConfigError(key, "key `" + key + "`: not an integer: " + *raw);
  }
  resolved_[key] = std::to_string(v);
  return static_cast<int>(v);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) {
  std::uint64_t v = def;
  if (const std::string* raw = lookup(key)) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(raw->c_str(), &end, 10);
    if (end != raw->c_str() + raw->size() || raw->empty() ||
        errno == ERANGE || raw->front() == '-')
      throw ConfigError(key,
                        "key `" + key + "`: not a 64-bit unsigned integer: " + *raw);
    v = parsed;
  }
  resolved_[key] = std::to_string(v);
  return v;
}

std::vector<std::string> Config::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (consumed_.count(k) == 0) out.push_back(k);
  return out;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : resolved_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace dwlab

#include "bellvol/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bellvol/error.hpp"
#include "bellvol/experiments.hpp"

namespace bellvol {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorKind::config_error, fmt::format("{}: '{}' is not a finite number", what, text));
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  // Accept 1e7-style counts as long as they are exact integers.
  if (t.find_first_of("eE.") != std::string::npos) {
    const double v = parse_double(t, what);
    if (v < 0 || v > 1.8e19 || std::floor(v) != v) {
      throw Error(ErrorKind::config_error, fmt::format("{}: '{}' is not a nonnegative integer", what, text));
    }
    return static_cast<std::uint64_t>(v);
  }
  errno = 0;
  char* end = nullptr;
  const auto v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw Error(ErrorKind::config_error, fmt::format("{}: '{}' is not a nonnegative integer", what, text));
  }
  return v;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config_error, fmt::format("{}:{}: expected key = value", source, line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::config_error, fmt::format("{}:{}: empty key", source, line_no));
    if (cfg.entries_.count(key) != 0) {
      throw Error(ErrorKind::config_error,
                  fmt::format("{}:{}: duplicate key '{}' (first set on line {})", source, line_no, key,
                              cfg.entries_.at(key).line));
    }
    cfg.entries_.emplace(key, Entry{value, line_no});
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, fmt::format("cannot open config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, e] : entries_) {
    if (allowed.count(key) == 0) {
      throw Error(ErrorKind::config_error, fmt::format("{}:{}: unknown key '{}'", source_, e.line, key));
    }
  }
}

void Config::fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error(ErrorKind::config_error, fmt::format("{}: key '{}': {}", source_, key, what));
  }
  throw Error(ErrorKind::config_error, fmt::format("{}:{}: key '{}': {}", source_, it->second.line, key, what));
}

const Config::Entry& Config::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(key, "required key is missing");
  return it->second;
}

std::string Config::get_string(const std::string& key) const {
  const auto& e = entry(key);
  if (e.value.empty()) fail(key, "value is empty");
  return e.value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  try {
    return parse_double(get_string(key), key);
  } catch (const Error& e) {
    fail(key, e.what());
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_u64(get_string(key), key);
  } catch (const Error& e) {
    fail(key, e.what());
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto v = get_u64(key, static_cast<std::uint64_t>(fallback));
  if (v > 1'000'000'000ull) fail(key, "value too large");
  return static_cast<int>(v);
}

std::vector<double> Config::get_list(const std::string& key) const {
  const std::string value = has(key) ? entry(key).value : std::string{};
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    try {
      out.push_back(parse_double(item, key));
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }
  if (out.empty()) fail(key, "list is empty");
  return out;
}

std::vector<double> Config::get_grid(const std::string& key) const {
  const std::string value = has(key) ? entry(key).value : std::string{};
  if (value.find(':') == std::string::npos) return get_list(key);
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) fail(key, "grid must be start:stop:step");
  try {
    return linear_grid(parse_double(parts[0], key), parse_double(parts[1], key), parse_double(parts[2], key));
  } catch (const Error& e) {
    fail(key, e.what());
  }
}

}  // namespace bellvol

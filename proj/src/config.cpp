#include "mvcorr/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace mvcorr {

namespace {

std::string trim(const std::string& s) {
  size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + stripped + "'");
    }
    std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    cfg.values_[key] = trim(stripped.substr(eq + 1));
  }
  return cfg;
}

void Config::set(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects KEY=VALUE, got '" + assignment + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing required config key '" + key + "'");
  }
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long Config::parse_int(const std::string& key, const std::string& value) const {
  try {
    size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

double Config::parse_double(const std::string& key, const std::string& value) const {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

long Config::get_int(const std::string& key, long fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int(key, it->second);
}

long Config::require_int(const std::string& key) const {
  return parse_int(key, get_string(key));
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + it->second + "'");
}

std::vector<long> Config::get_int_list(const std::string& key,
                                       const std::vector<long>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<long> out;
  std::string token;
  std::istringstream in(it->second);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    out.push_back(parse_int(key, token));
  }
  return out;
}

std::string Config::to_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) {
    out << key << '=' << value << '\n';
  }
  return out.str();
}

}  // namespace mvcorr

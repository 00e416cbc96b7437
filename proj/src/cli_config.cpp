#include "arp/cli.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace arp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

bool Config::has(const std::string& key) const {
  touched.insert(key);
  return kv.count(key) > 0;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  touched.insert(key);
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

std::string Config::require(const std::string& key) const {
  touched.insert(key);
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing required config key: " + key);
  return it->second;
}

double Config::num(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return require_num(key);
}

double Config::require_num(const std::string& key) const {
  const std::string raw = require(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (trim(raw.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key " + key + " is not a number: '" + raw + "'");
}

std::int64_t Config::integer(const std::string& key, std::int64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = trim(require(key));
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || p != raw.data() + raw.size())
    throw ConfigError("config key " + key + " is not an integer: '" + raw + "'");
  return v;
}

std::uint64_t Config::uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = trim(require(key));
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || p != raw.data() + raw.size())
    throw ConfigError("config key " + key + " is not an unsigned integer: '" + raw + "'");
  return v;
}

std::vector<double> Config::list(const std::string& key) const {
  const std::string raw = require(key);
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (!trim(item.substr(used)).empty()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " has a non-numeric entry: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + " is an empty list");
  return out;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : kv)
    if (!touched.count(key)) out.push_back(key);
  return out;
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(ss, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineNo) + " is not `key = value`: '" +
                        line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineNo) + " has no key");
    if (cfg.kv.count(key))
      throw ConfigError("config key " + key + " appears twice (line " + std::to_string(lineNo) +
                        ")");
    cfg.kv[key] = value;
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const Config& cfg) {
  std::string out;
  for (const auto& [key, value] : cfg.kv) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace arp::cli

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evoscalar/cli.hpp"
#include "evoscalar/error.hpp"

namespace evo::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ConfigEntry> load_config(std::istream& in, const std::string& source) {
  std::vector<ConfigEntry> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string where = source + ":" + std::to_string(line);
    if (eq == std::string::npos) throw InputError(reason::kFormat, where + ": expected `key = value`");
    ConfigEntry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (e.key.empty()) throw InputError(reason::kFormat, where + ": missing key");
    if (e.value.empty()) throw InputError(reason::kFormat, where + ": missing value for `" + e.key + "`");
    for (const auto& prev : out) {
      if (prev.key == e.key) {
        throw InputError(reason::kFormat, where + ": duplicate key `" + e.key + "` (first set on line " +
                                              std::to_string(prev.line) + ")");
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConfigEntry> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(reason::kFormat, "cannot open config file " + path);
  return load_config(in, path);
}

void Params::set(const std::string& key, const std::string& value, const std::string& origin) {
  values_[key] = value;
  origins_[key] = origin;
}

bool Params::has(const std::string& key) const {
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::string Params::str(const std::string& key) const {
  if (!has(key)) throw InputError(reason::kParameter, "missing required parameter `" + key + "`");
  return values_.at(key);
}

double Params::num(const std::string& key) const {
  const std::string s = str(key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw InputError(reason::kFormat, "parameter `" + key + "` (" + origins_.at(key) + "): `" + s + "` is not a number");
  }
  return v;
}

int Params::integer(const std::string& key) const {
  const double v = num(key);
  if (v != std::floor(v) || std::fabs(v) > 2e9) {
    throw InputError(reason::kFormat, "parameter `" + key + "` (" + origins_.at(key) + ") must be an integer");
  }
  return static_cast<int>(v);
}

bool Params::flag(const std::string& key) const {
  if (!has(key)) return false;
  const std::string s = values_.at(key);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw InputError(reason::kFormat, "parameter `" + key + "` (" + origins_.at(key) + ") must be a boolean");
}

std::vector<double> Params::list(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) return out;
  std::stringstream ss(values_.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    Params one;
    one.set(key, trim(item), origins_.at(key));
    out.push_back(one.num(key));
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError(reason::kParameter, "cannot write " + tmp);
    f << content;
    f.flush();
    if (!f) throw InputError(reason::kParameter, "write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw InputError(reason::kParameter, "cannot rename " + tmp + " to " + path);
  }
}

}  // namespace evo::cli

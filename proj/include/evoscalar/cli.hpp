#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace evo::cli {

// One `key = value` line of a config file.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Parses a flat key-value document; `#` starts a comment. Malformed lines
// raise InputError(format) naming the source and line.
std::vector<ConfigEntry> load_config(std::istream& in, const std::string& source);
std::vector<ConfigEntry> load_config_file(const std::string& path);

// String-valued parameters of one subcommand with typed accessors. Each value
// remembers where it came from so conversion errors can point at it.
class Params {
public:
  void set(const std::string& key, const std::string& value, const std::string& origin);
  bool has(const std::string& key) const;
  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origins_;
};

struct Outcome {
  std::string summary;       // one line, printed to stdout
  std::string csv;           // written to --out when given
  nlohmann::json details;    // sidecar "summary" field
  int exit_code = 0;         // 2 when the command itself reports a numerical failure
  std::string failure;       // reason printed to the diagnostic stream when exit_code != 0
};

struct Check {
  std::string name;
  bool pass = false;
};

struct OptionDef {
  std::string name;
  std::string fallback;  // empty means unset
  std::string help;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptionDef> options;
  std::function<Outcome(const Params&)> execute;
  std::function<std::vector<Check>()> selftest;
};

const std::vector<Command>& commands();

// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

// Runs one subcommand; returns the process exit code (0 ok, 1 input error,
// 2 numerical failure).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evo::cli

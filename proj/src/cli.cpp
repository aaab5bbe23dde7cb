#include <CLI11.hpp>
#include <algorithm>
#include <ostream>

#include "evoscalar/cli.hpp"
#include "evoscalar/error.hpp"

namespace evo::cli {

namespace {

struct Bound {
  const Command* cmd = nullptr;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::string config;
  std::string out;
  bool selftest = false;
};

Params collect(Bound& b) {
  std::map<std::string, ConfigEntry> file;
  if (!b.config.empty()) {
    for (auto& e : load_config_file(b.config)) {
      const bool known = e.key == "out" || std::any_of(b.cmd->options.begin(), b.cmd->options.end(),
                                                        [&](const OptionDef& o) { return o.name == e.key; });
      if (!known) {
        throw InputError(reason::kFormat, b.config + ":" + std::to_string(e.line) + ": unknown key `" + e.key +
                                              "` for subcommand " + b.cmd->name);
      }
      file[e.key] = e;
    }
  }
  Params p;
  for (const auto& o : b.cmd->options) {
    if (b.app->get_option("--" + o.name)->count() > 0) {
      p.set(o.name, b.values[o.name], "flag --" + o.name);
    } else if (auto it = file.find(o.name); it != file.end()) {
      p.set(o.name, it->second.value, b.config + ":" + std::to_string(it->second.line));
    } else {
      p.set(o.name, o.fallback, "default");
    }
  }
  if (b.out.empty()) {
    if (auto it = file.find("out"); it != file.end()) b.out = it->second.value;
  }
  return p;
}

int selftest(const Command& cmd, std::ostream& out) {
  int failed = 0;
  const auto checks = cmd.selftest();
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << cmd.name << ": " << c.name << "\n";
    if (!c.pass) ++failed;
  }
  out << cmd.name << " selftest: " << checks.size() - failed << "/" << checks.size() << " passed\n";
  return failed == 0 ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scalar-type evolution equations: propagators, resolvents, spectra, decay and admissibility"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  std::vector<Bound> bound;
  bound.reserve(commands().size());
  for (const auto& cmd : commands()) {
    bound.push_back({&cmd, nullptr, {}, {}, {}, false});
    Bound& b = bound.back();
    b.app = app.add_subcommand(cmd.name, cmd.help);
    for (const auto& o : cmd.options) {
      std::string help = o.help;
      if (!o.fallback.empty()) help += " [default " + o.fallback + "]";
      b.app->add_option("--" + o.name, b.values[o.name], help);
    }
    b.app->add_option("--config", b.config, "Flat `key = value` config file; flags override it");
    b.app->add_option("--out", b.out, "CSV output path; a sidecar JSON is written to <out>.json");
    b.app->add_flag("--selftest", b.selftest, "Run this module's basic examples and report pass/fail");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error [usage]: " << e.what() << "\n";
    return 1;
  }

  auto it = std::find_if(bound.begin(), bound.end(), [](const Bound& b) { return b.app->parsed(); });
  if (it == bound.end()) {
    err << "error [usage]: no subcommand given\n";
    return 1;
  }
  Bound& b = *it;
  try {
    if (b.selftest) return selftest(*b.cmd, out);
    const Params p = collect(b);
    Outcome res = b.cmd->execute(p);
    if (!b.out.empty()) {
      write_atomic(b.out, res.csv);
      nlohmann::json side;
      side["command"] = b.cmd->name;
      side["config"] = p.values();
      side["summary"] = res.details;
      write_atomic(b.out + ".json", side.dump(2) + "\n");
    }
    out << res.summary << "\n";
    if (res.exit_code != 0) err << "numerical failure [" << reason::kAccuracy << "]: " << res.failure << "\n";
    return res.exit_code;
  } catch (const InputError& e) {
    err << "error [" << e.reason() << "]: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure [" << e.reason() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure [internal]: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace evo::cli

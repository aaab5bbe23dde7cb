#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evoscalar/cli.hpp"
#include "evoscalar/error.hpp"

using evo::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream o, e;
  int code = run(args, o, e);
  return {code, o.str(), e.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("evo_cli_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("ml prints e") {
  auto r = call({"ml", "--alpha", "1", "--delta", "1", "--z", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("2.718281828", 0) == 0);
}

TEST_CASE("exit codes") {
  auto empty = call({"region", "--kind", "heat", "--p0", "1.5", "--lambda", "6"});
  CHECK(empty.code == 0);
  CHECK(empty.out == "empty\n");
  auto div = call({"picard", "--kind", "heat", "--eta", "3", "--norm-w0", "1e3"});
  CHECK(div.code == 2);
  CHECK(div.err.find("divergence") != std::string::npos);
  CHECK(call({"nosuch"}).code == 1);
  CHECK(call({}).code == 1);
  CHECK(call({"ml", "--alpha", "-1", "--z", "1"}).code == 1);
  CHECK(call({"ml", "--alpha", "abc", "--z", "1"}).code == 1);
  CHECK(call({"ml", "--z", "1"}).err.find("alpha") != std::string::npos);
  CHECK(call({"ml", "--bogus", "1"}).code == 1);
  CHECK(call({"region", "--kind", "heat", "--p0", "2", "--lambda", "2", "--eta", "2"}).code == 1);
}

TEST_CASE("config precedence and errors") {
  const std::string cfg = temp_path("cfg.txt");
  const std::string out = temp_path("cfg_out.csv");
  write_file(cfg, "# resolvent run\nkernel = power-law\nbeta = 0.5\nlambda = 1\nT = 0.1\ndt = 1e-3\n");
  auto a = call({"resolvent", "--config", cfg, "--dt", "1e-4", "--out", out});
  REQUIRE(a.code == 0);
  auto side = nlohmann::json::parse(slurp(out + ".json"));
  CHECK(side["command"] == "resolvent");
  CHECK(side["config"]["dt"] == "1e-4");
  CHECK(side["config"]["beta"] == "0.5");
  CHECK(side.contains("summary"));
  const std::string csv = slurp(out);
  CHECK(csv.rfind("t,s,bound\n", 0) == 0);

  write_file(cfg, "");
  CHECK(call({"resolvent", "--config", cfg, "--kernel", "constant", "--lambda", "1", "--T", "1"}).code == 0);

  write_file(cfg, "kernel = constant\n\nfoo = 3\n");
  auto bad = call({"resolvent", "--config", cfg, "--lambda", "1"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("foo") != std::string::npos);
  CHECK(bad.err.find(":3") != std::string::npos);

  write_file(cfg, "kernel constant\n");
  auto malformed = call({"resolvent", "--config", cfg});
  CHECK(malformed.code == 1);
  CHECK(malformed.err.find(":1") != std::string::npos);

  write_file(cfg, "lambda = one\nkernel = constant\n");
  auto conv = call({"resolvent", "--config", cfg});
  CHECK(conv.code == 1);
  CHECK(conv.err.find(":1") != std::string::npos);
  CHECK(call({"resolvent", "--config", temp_path("missing.txt")}).code == 1);
  std::remove(cfg.c_str());
  std::remove(out.c_str());
  std::remove((out + ".json").c_str());
}

TEST_CASE("load_config parses comments and rejects duplicates") {
  std::istringstream in("a = 1 # trailing\n  # only comment\n\nb=two words\n");
  auto e = evo::cli::load_config(in, "mem");
  REQUIRE(e.size() == 2);
  CHECK(e[0].key == "a");
  CHECK(e[0].value == "1");
  CHECK(e[1].value == "two words");
  CHECK(e[1].line == 4);
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(evo::cli::load_config(dup, "mem"), evo::InputError);
}

TEST_CASE("csv output is deterministic") {
  const std::string a = temp_path("det_a.csv"), b = temp_path("det_b.csv");
  const std::vector<std::string> base = {"decay", "--kind", "heat", "--p", "1.5", "--q", "4",
                                         "--t-a", "1e-3", "--t-b", "1e-2", "--N", "64"};
  auto args_a = base, args_b = base;
  args_a.insert(args_a.end(), {"--out", a});
  args_b.insert(args_b.end(), {"--out", b});
  REQUIRE(call(args_a).code == 0);
  REQUIRE(call(args_b).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("t,Lq_norm,bound_B,ratio\n", 0) == 0);
  CHECK_FALSE(std::filesystem::exists(a + ".tmp"));
  for (const auto& f : {a, b, a + ".json", b + ".json"}) std::remove(f.c_str());
}

TEST_CASE("region csv schema") {
  const std::string out = temp_path("region.csv");
  auto r = call({"region", "--kind", "wave-type", "--beta", "1.5", "--p0", "2", "--lambda", "1", "--resolution", "10",
                 "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("nonempty", 0) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("inv_q,inv_r,admissible\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);
  std::remove(out.c_str());
  std::remove((out + ".json").c_str());
}

TEST_CASE("every subcommand has a passing selftest") {
  for (const auto& cmd : evo::cli::commands()) {
    auto r = call({cmd.name, "--selftest"});
    INFO(cmd.name << ": " << r.out);
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }
}

TEST_CASE("remaining subcommands run") {
  CHECK(call({"mlbound", "--alpha", "0.5", "--t-max", "100", "--samples", "200"}).code == 0);
  CHECK(call({"fracderiv", "--beta", "0.5"}).code == 0);
  CHECK(call({"sonine", "--kernel", "caputo-dual", "--beta", "0.4", "--T", "0.5"}).code == 0);
  CHECK(call({"catalog", "--operator", "cartan_D2"}).out == "cartan_D2: lambda = 4.5\n");
  CHECK(call({"catalog", "--operator", "nope"}).code == 1);
  CHECK(call({"countfit", "--model", "prescribed", "--lambda", "1.7", "--s-min", "1e2", "--s-max", "1e3"}).code == 0);
  CHECK(call({"bound", "--kind", "heat", "--model", "torus", "--p", "1.5", "--q", "4"}).code == 0);
  auto sch = call({"bound", "--kind", "schrodinger-type", "--beta", "0.5", "--model", "torus", "--p", "1.5", "--q", "4"});
  CHECK(sch.code == 1);
}

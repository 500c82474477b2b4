#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "recasm/runtime.hpp"
#include "support.hpp"

using namespace recasm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("recasm_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("run prints the output slot") {
  Result r = cli_run({"run", support::corpus("mergesort"), "--input", R"({"unsorted_list":[5,4,3,2,1]})"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["format"] == 1);
  CHECK(j["status"] == "quiescent");
  CHECK(j["outputs"]["sorted_list"] == json::array({1, 2, 3, 4, 5}));
}

TEST_CASE("run streams observed values") {
  Result r = cli_run({"run", support::corpus("sieve"), "--max-steps", "100"});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  auto primes = support::primes_by_trial_division(4);
  for (std::size_t i = 0; i < primes.size(); ++i) CHECK(j["streams"]["out_prime"][i] == primes[i]);
}

TEST_CASE("run exit codes") {
  TempDir tmp;
  std::ofstream(tmp / "bad.recasm") << "main rule m() {\n  x := \n}\n";
  Result parse_err = cli_run({"run", tmp / "bad.recasm"});
  CHECK(parse_err.code == 1);
  CHECK(parse_err.err.rfind(tmp / "bad.recasm" + ":3:1: ", 0) == 0);
  CHECK(cli_run({"run", support::corpus("conflict")}).code == 2);
  CHECK(cli_run({"run", support::corpus("conflict"), "--on-inconsistency", "skip", "--max-steps", "5"}).code == 0);
  CHECK(cli_run({"run", support::corpus("sieve"), "--max-steps", "5", "--expect-quiescent"}).code == 3);
  CHECK(cli_run({"run", support::corpus("sieve"), "--policy", "nope"}).code == 1);
  CHECK(cli_run({"frobnicate"}).code == 1);
}

TEST_CASE("RECASM_SEED overrides the seed") {
  TempDir tmp;
  std::vector<std::string> base = {"run", support::corpus("quicksort"), "--input", R"({"unsorted_list":[3,8,1,6,2]})",
                                   "--policy", "random-subset", "--seed"};
  auto with = [&](const std::string& seed, const std::string& file) {
    auto args = base;
    args.push_back(seed);
    args.push_back("--trace");
    args.push_back(tmp / file);
    cli_run(args);
    return slurp(tmp / file);
  };
  std::string s9 = with("9", "a.jsonl");
  ::setenv("RECASM_SEED", "9", 1);
  std::string overridden = with("1", "b.jsonl");
  ::unsetenv("RECASM_SEED");
  CHECK(s9 == overridden);
  CHECK(json::parse(s9.substr(0, s9.find('\n')))["seed"] == 9);
}

TEST_CASE("check passes engine traces and flags injected faults") {
  TempDir tmp;
  std::string trace = tmp / "t.jsonl";
  REQUIRE(cli_run({"run", support::corpus("mergesort"), "--input", R"({"unsorted_list":[3,1,2]})", "--trace", trace})
              .code == 0);
  Result ok = cli_run({"check", trace, "--program", support::corpus("mergesort"), "--postulates", "--po-run"});
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["pass"] == true);

  Trace t = read_trace_file(trace);
  Move m;
  m.agent = m.ambient = AgentId{0};
  m.rule = "sort";
  m.read_index = m.write_index = 1;
  t.steps[1].moves.push_back(m);
  std::ofstream(tmp / "fault.jsonl") << trace_to_jsonl(t);
  Result bad = cli_run({"check", tmp / "fault.jsonl", "--postulates"});
  CHECK(bad.code == 4);
  CHECK(bad.err.find("step 2: waiting-agent-stepped") != std::string::npos);

  std::ofstream(tmp / "junk.jsonl") << "not json\n";
  CHECK(cli_run({"check", tmp / "junk.jsonl"}).code == 1);
  CHECK(cli_run({"check", trace, "--po-run", "--program", support::corpus("quicksort")}).code == 1);
}

TEST_CASE("transform writes parseable programs") {
  TempDir tmp;
  CHECK(cli_run({"transform", "flatten", support::corpus("relay"), tmp / "flat.recasm"}).code == 0);
  Program flat = parse_file(tmp / "flat.recasm");
  CHECK(flat.rule(flat.main).body->children.size() == 7);
  CHECK(cli_run({"transform", "wrap", support::corpus("mergesort"), tmp / "w.recasm"}).code == 0);
  CHECK(cli_run({"transform", "delegate", tmp / "w.recasm", tmp / "d.recasm"}).code == 0);
  CHECK_NOTHROW(parse_file(tmp / "d.recasm"));
  Result refused = cli_run({"transform", "flatten", support::corpus("mergesort"), tmp / "x.recasm"});
  CHECK(refused.code == 1);
  CHECK(refused.err.find("static system") != std::string::npos);

  // Wrapped and direct runs end in the same state.
  auto final_state = [&](const std::string& prog, const std::string& out) {
    cli_run({"run", prog, "--input", R"({"unsorted_list":[4,2,9]})", "--policy", "random-subset", "--seed", "6",
             "--final-state", out});
    return slurp(out);
  };
  CHECK(final_state(support::corpus("mergesort"), tmp / "s1.json") == final_state(tmp / "w.recasm", tmp / "s2.json"));
}

TEST_CASE("enumerate and export-dot") {
  TempDir tmp;
  Result e = cli_run({"enumerate", support::corpus("counters"), "--depth", "2"});
  CHECK(e.code == 0);
  json j = json::parse(e.out);
  CHECK(j["format"] == 1);
  CHECK(j["runs"].size() == j["count"]);
  std::string trace = tmp / "t.jsonl";
  cli_run({"run", support::corpus("quicksort"), "--input", R"({"unsorted_list":[2,1]})", "--trace", trace});
  Result d = cli_run({"export-dot", trace, "--json", tmp / "po.json"});
  CHECK(d.code == 0);
  CHECK(d.out.rfind("digraph po_run", 0) == 0);
  CHECK(json::parse(slurp(tmp / "po.json"))["format"] == 1);
}

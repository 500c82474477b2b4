// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"
#include "recasm/concurrency.hpp"
#include "recasm/printer.hpp"
#include "support.hpp"

using namespace recasm;
using support::load;

namespace {

constexpr double kLimitFact1 = 10.0;
constexpr double kLimitSorting = 60.0;
constexpr double kLimitChain = 120.0;
constexpr double kLimitFlatten = 60.0;
constexpr double kLimitDelegate = 60.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int n, const std::string& name, double limit, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = limit <= 0 || secs < limit;
  bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << "  " << name << "  " << o.detail;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << "  [" << secs << " s";
  if (limit > 0) line << ", limit " << limit << " s";
  line << "]";
  if (!in_time) line << " (too slow)";
  std::cout << line.str() << std::endl;
}

// ---- random structures ----

Value random_value(std::mt19937_64& rng, bool with_ids) {
  std::uniform_int_distribution<int> pick(0, with_ids ? 9 : 7);
  std::uniform_int_distribution<int> small(-3, 12);
  switch (pick(rng)) {
    case 0:
      return Value();
    case 1:
    case 2:
      return Value(small(rng));
    case 3:
    case 4:
    case 5: {
      std::uniform_int_distribution<int> len(0, 4);
      Value::List l;
      for (int i = len(rng); i > 0; --i) l.emplace_back(small(rng));
      return Value(std::move(l));
    }
    case 6:
      return Value(rng() % 2 == 0);
    case 7:
      return Value::symbol(rng() % 2 ? "low" : "high");
    case 8:
      return Value::agent(rng() % 4);
    default:
      return Value::list({Value::agent(rng() % 4), Value::symbol(rng() % 2 ? "p" : "q")});
  }
}

Location random_location(std::mt19937_64& rng) {
  static const char* syms[] = {"f", "g", "h", "k"};
  Location l;
  if (rng() % 4) l.ambient = AgentId{rng() % 5};
  l.symbol = syms[rng() % 4];
  for (auto n = rng() % 3; n > 0; --n) l.args.emplace_back(static_cast<int>(rng() % 3));
  return l;
}

// ---- criterion 1 ----

Outcome fact1() {
  std::mt19937_64 rng(1);
  std::size_t bad_reconstruct = 0, bad_minimal = 0, pairs = 0;
  for (; pairs < 1000; ++pairs) {
    State s;
    for (auto n = rng() % 12; n > 0; --n) s.assign(random_location(rng), random_value(rng, true));
    std::map<Location, Value> oracle = s.store();
    UpdateSet delta;
    std::set<Location> used;
    for (auto n = rng() % 10; n > 0; --n) {
      Location l;
      if (!s.store().empty() && rng() % 2) {
        auto it = s.store().begin();
        std::advance(it, static_cast<long>(rng() % s.store().size()));
        l = it->first;
      } else {
        l = random_location(rng);
      }
      if (!used.insert(l).second) continue;
      Value v = rng() % 5 == 0 ? s.lookup(l) : random_value(rng, true);
      delta.insert({l, v});
      if (v.is_undef()) {
        oracle.erase(l);
      } else {
        oracle[l] = v;
      }
    }
    State target = std::get<State>(apply_updates(s, delta));
    UpdateSet diff = diff_states(s, target);
    State rebuilt = std::get<State>(apply_updates(s, diff));
    if (rebuilt.store() != oracle || target.store() != oracle) ++bad_reconstruct;
    for (const auto& u : diff) {
      UpdateSet less = diff;
      less.erase(u);
      if (std::get<State>(apply_updates(s, less)).store() == oracle) {
        ++bad_minimal;
        break;
      }
    }
  }
  std::ostringstream d;
  d << pairs << " pairs, " << bad_reconstruct << " reconstruction failures, " << bad_minimal << " non-minimal diffs";
  return {bad_reconstruct == 0 && bad_minimal == 0, d.str()};
}

// ---- criteria 2 and 3 ----

struct CorpusRule {
  std::string file;
  const Program* program;
  const RuleDecl* rule;
};

std::vector<Program>& corpus_programs() {
  static std::vector<Program> ps;
  return ps;
}

std::vector<CorpusRule> corpus_rules() {
  static const std::vector<std::string> files = {"mergesort", "quicksort", "sieve", "counters", "relay", "conflict"};
  auto& ps = corpus_programs();
  if (ps.empty()) {
    for (const auto& f : files) ps.push_back(load(f));
  }
  std::vector<CorpusRule> out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    for (const auto& r : ps[i].rules) out.push_back({files[i], &ps[i], &r});
  }
  return out;
}

State random_state_for(const Program& p, std::mt19937_64& rng, bool with_ids) {
  State s(p.signature);
  for (const auto& [name, info] : p.signature->symbols()) {
    std::vector<std::optional<AgentId>> ambients;
    if (info.shared) {
      ambients.push_back(std::nullopt);
    } else {
      for (std::uint64_t a = 0; a < 3; ++a) ambients.push_back(AgentId{a});
    }
    for (const auto& amb : ambients) {
      if (rng() % 10 < 6) {
        std::vector<Value> args;
        for (std::size_t k = 0; k < info.arity; ++k) args.emplace_back(static_cast<int>(rng() % 3));
        s.assign(Location{amb, name, args}, random_value(rng, with_ids));
      }
    }
  }
  return s;
}

void maybe_alias_output(State& s, const RuleDecl& r, AgentId ambient, std::mt19937_64& rng) {
  if (!r.output.empty() && rng() % 2) s.add_alias(ambient, r.output, Location{AgentId{7}, "slot", {Value(int(rng() % 3))}});
}

Outcome bounded_exploration() {
  std::mt19937_64 rng(2);
  std::size_t rules = 0, counterexamples = 0, short_rules = 0, differing = 0, busy = 0;
  std::size_t min_found = SIZE_MAX;
  for (const auto& cr : corpus_rules()) {
    ++rules;
    const Program& p = *cr.program;
    std::vector<std::string> syms;
    for (const auto& [name, info] : p.signature->symbols()) syms.push_back(name);
    std::size_t found = 0;
    for (std::size_t attempt = 0; attempt < 200000 && found < 1000; ++attempt) {
      AgentId amb{rng() % 3};
      State s1 = random_state_for(p, rng, false);
      maybe_alias_output(s1, *cr.rule, amb, rng);
      State s2 = s1;
      for (auto n = 1 + rng() % 3; n > 0; --n) {
        switch (rng() % 4) {
          case 0: {  // another agent's locations
            const std::string& f = syms[rng() % syms.size()];
            const SymbolInfo& info = *p.signature->find(f);
            if (info.shared) break;
            std::vector<Value> args(info.arity, Value(int(rng() % 3)));
            s2.assign(Location{AgentId{3 + rng() % 3}, f, args}, random_value(rng, false));
            break;
          }
          case 1:  // a symbol the rule does not know
            s2.assign(Location{amb, "unrelated", {}}, random_value(rng, false));
            break;
          case 2: {  // any location of the program, possibly a read one
            const std::string& f = syms[rng() % syms.size()];
            const SymbolInfo& info = *p.signature->find(f);
            std::vector<Value> args(info.arity, Value(int(rng() % 3)));
            std::optional<AgentId> a;
            if (!info.shared) a = amb;
            s2.assign(Location{a, f, args}, random_value(rng, false));
            break;
          }
          default:  // rewrite a stored value with itself
            if (!s1.store().empty()) {
              auto it = s1.store().begin();
              std::advance(it, static_cast<long>(rng() % s1.store().size()));
              s2.assign(it->first, it->second);
            }
        }
      }
      Environment env = Environment::of(amb);
      if (!coincide_on_witness(*cr.rule->body, s1, s2, env, &p)) continue;
      ++found;
      EvalContext c1{s1, &p, nullptr}, c2{s2, &p, nullptr};
      UpdateSetFamily f1 = delta(*cr.rule->body, c1, env);
      if (f1 != delta(*cr.rule->body, c2, env)) ++counterexamples;
      if (!(s1 == s2)) ++differing;
      if (f1.size() > 1 || !f1.front().updates.empty() || !f1.front().spawns.empty()) ++busy;
    }
    min_found = std::min(min_found, found);
    if (found < 1000) ++short_rules;
  }
  std::ostringstream d;
  d << rules << " rules, fewest coinciding pairs for a rule " << min_found << " (" << differing
    << " pairs differ, " << busy << " with non-empty families), " << counterexamples << " counterexamples";
  return {counterexamples == 0 && short_rules == 0, d.str()};
}

std::set<std::string> symbol_constants(const Rule& r) {
  std::set<std::string> out;
  std::function<void(const TermPtr&)> term = [&](const TermPtr& t) {
    if (!t) return;
    if (t->kind == Term::Kind::constant && t->value.is_symbol()) out.insert(t->value.as_symbol().name);
    for (const auto& a : t->args) term(a);
  };
  std::function<void(const Rule&)> rule = [&](const Rule& x) {
    term(x.target);
    term(x.term);
    term(x.domain.lo);
    term(x.domain.hi);
    for (const auto& a : x.args) term(a);
    for (const auto& c : x.children) rule(*c);
  };
  rule(r);
  return out;
}

Isomorphism random_renaming(std::mt19937_64& rng, const std::set<std::string>& fixed) {
  std::vector<Value> agents, syms;
  for (std::uint64_t a = 0; a < 6; ++a) agents.push_back(Value::agent(a));
  for (const char* s : {"low", "high", "p", "q"}) {
    if (!fixed.count(s)) syms.push_back(Value::symbol(s));
  }
  std::map<Value, Value> m;
  for (auto* group : {&agents, &syms}) {
    std::vector<Value> image = *group;
    std::shuffle(image.begin(), image.end(), rng);
    for (std::size_t i = 0; i < group->size(); ++i) m.emplace((*group)[i], image[i]);
  }
  return Isomorphism(std::move(m));
}

Outcome isomorphism_equivariance() {
  std::mt19937_64 rng(3);
  std::size_t checks = 0, counterexamples = 0, nontrivial = 0;
  for (const auto& cr : corpus_rules()) {
    const Program& p = *cr.program;
    std::set<std::string> fixed = symbol_constants(*cr.rule->body);
    for (int i = 0; i < 200; ++i) {
      AgentId amb{rng() % 3};
      State s = random_state_for(p, rng, true);
      maybe_alias_output(s, *cr.rule, amb, rng);
      Isomorphism iso = random_renaming(rng, fixed);
      State t = apply_isomorphism(iso, s);
      if (!(t == s)) ++nontrivial;
      UpdateSetFamily lhs = delta(*cr.rule->body, EvalContext{t, &p, nullptr}, Environment::of(iso.apply(amb)));
      UpdateSetFamily rhs = apply_isomorphism(iso, delta(*cr.rule->body, EvalContext{s, &p, nullptr}, Environment::of(amb)));
      ++checks;
      if (lhs != rhs) ++counterexamples;
    }
  }
  std::ostringstream d;
  d << checks << " renamings (" << nontrivial << " moved the state), " << counterexamples << " counterexamples";
  return {counterexamples == 0 && nontrivial * 2 > checks, d.str()};
}

// ---- criterion 4 ----

std::vector<Trace>& corpus_traces() {
  static std::vector<Trace> ts;
  return ts;
}

const std::vector<SchedulerPolicy> kPolicies = {SchedulerPolicy::synchronous(), SchedulerPolicy::interleaving(),
                                                SchedulerPolicy::random_subset()};

Outcome sorting_and_sieve() {
  std::mt19937_64 rng(4);
  std::size_t runs = 0, wrong = 0;
  for (const std::string f : {"mergesort", "quicksort"}) {
    Program p = load(f);
    for (int l = 0; l < 50; ++l) {
      auto xs = support::random_list(rng, 32, 1000);
      auto expect = support::sorted_copy(xs);
      for (const auto& pol : kPolicies) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
          Engine e(p, EngineConfig{pol, seed, InconsistencyPolicy::halt, 0}, {{"unsorted_list", support::to_value(xs)}});
          RunStatus st = e.run_to_quiescence(1000000);
          ++runs;
          auto got = support::ints_of(support::main_output(e));
          if (st != RunStatus::quiescent || !got || *got != expect) ++wrong;
          corpus_traces().push_back(e.trace());
        }
      }
    }
  }
  Engine sieve(load("sieve"), EngineConfig{SchedulerPolicy::synchronous(), 0, InconsistencyPolicy::halt, 0});
  std::vector<std::int64_t> primes;
  for (int k = 0; k < 1000 && primes.size() < 20; ++k) {
    sieve.step();
    primes.clear();
    for (const auto& o : sieve.observations()) {
      if (o.value.is_int()) primes.push_back(o.value.as_int());
    }
  }
  corpus_traces().push_back(sieve.trace());
  primes.resize(std::min<std::size_t>(primes.size(), 20));
  bool sieve_ok = primes == support::primes_by_trial_division(20);
  std::ostringstream d;
  d << runs << " sorting runs, " << wrong << " wrong; sieve first 20 primes " << (sieve_ok ? "match" : "differ");
  return {wrong == 0 && sieve_ok, d.str()};
}

// ---- criterion 5 ----

Trace with_waiting_agent_stepped(Trace t) {
  // a0 calls in step 1 and waits during step 2.
  Move m;
  m.agent = AgentId{0};
  m.ambient = AgentId{0};
  m.rule = t.header.agents.front().rule;
  m.read_index = m.write_index = 1;
  t.steps.at(1).moves.push_back(m);
  return t;
}

Trace with_callee_local_write(Trace t) {
  for (auto& s : t.steps) {
    for (auto& m : s.moves) {
      if (m.spawns.empty()) continue;
      const SpawnRecord& c = m.spawns.front();
      m.updates.insert({Location{c.ambient, "scratch", {}}, Value(1)});
      return t;
    }
  }
  throw std::runtime_error("trace has no calls");
}

Trace with_extra_branching(Trace t) {
  Move& m = t.steps.back().moves.front();
  std::uint64_t fresh = 1000000;
  while (m.spawns.size() <= t.header.branching_bound) {
    SpawnRecord r;
    r.id = r.ambient = AgentId{fresh++};
    r.spawn.rule = m.rule;
    r.spawn.caller = m.ambient;
    r.spawn.output = Location{m.ambient, "extra", {Value(int(fresh))}};
    m.spawns.push_back(r);
  }
  return t;
}

std::string kinds(const AssertionReport& r) {
  std::string out;
  for (const auto& v : r.violations) out += (out.empty() ? "" : ",") + v.kind;
  return out.empty() ? "none" : out;
}

Outcome postulates() {
  auto& traces = corpus_traces();
  for (const std::string f : {"pmergesort", "pquicksort"}) {
    Engine e(load(f), EngineConfig{SchedulerPolicy::random_subset(), 9, InconsistencyPolicy::halt, 0},
             {{"input", support::to_value({4, -1, 7, 0, 3})}});
    e.run_to_quiescence(10000);
    traces.push_back(e.trace());
  }
  for (const std::string f : {"counters", "relay", "conflict"}) {
    for (const auto& pol : kPolicies) {
      Engine e(load(f), EngineConfig{pol, 5, InconsistencyPolicy::skip, 0});
      e.run_to_quiescence(50);
      traces.push_back(e.trace());
    }
  }
  std::size_t bad = 0;
  for (const auto& t : traces) {
    if (!assert_postulates(t).ok()) ++bad;
  }

  Engine base(load("mergesort"), EngineConfig{SchedulerPolicy::synchronous(), 0, InconsistencyPolicy::halt, 0},
              {{"unsorted_list", support::to_value({3, 1, 2, 5})}});
  base.run_to_quiescence(10000);
  // Round trip through the file format before injecting.
  std::istringstream in(trace_to_jsonl(base.trace()));
  Trace clean = read_trace(in);
  struct Fault {
    std::string want;
    Trace trace;
  };
  std::vector<Fault> faults = {{"waiting-agent-stepped", with_waiting_agent_stepped(clean)},
                               {"caller-writes-callee-local", with_callee_local_write(clean)},
                               {"branching", with_extra_branching(clean)}};
  bool faults_ok = true;
  std::string got;
  for (const auto& f : faults) {
    AssertionReport r = assert_postulates(f.trace);
    bool exact = r.violations.size() == 1 && r.violations.front().kind == f.want;
    faults_ok = faults_ok && exact;
    got += (got.empty() ? "" : "; ") + f.want + " -> " + kinds(r);
  }
  std::ostringstream d;
  d << traces.size() << " corpus traces, " << bad << " with violations; faults: " << got;
  return {bad == 0 && faults_ok, d.str()};
}

// ---- criterion 6 ----

Outcome chain() {
  std::mt19937_64 rng(6);
  std::size_t runs = 0, unequal = 0, failed = 0, moves = 0, segments = 0;
  for (const std::string f : {"mergesort", "quicksort"}) {
    Program p = load(f);
    Program w = wrap_recursive_as_concurrent(p);
    for (int l = 0; l < 10; ++l) {
      auto xs = support::random_list(rng, 8, 1000);
      std::map<std::string, Value> in{{"unsorted_list", support::to_value(xs)}};
      for (const auto& pol : kPolicies) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
          EngineConfig cfg{pol, seed, InconsistencyPolicy::halt, 0};
          Engine rec(p, cfg, in), con(w, cfg, in);
          rec.run_to_quiescence(100000);
          con.run_to_quiescence(100000);
          ++runs;
          if (rec.history() != con.history() || con.status() != RunStatus::quiescent) ++unequal;
          PoRun po = extract_po_run(con.trace());
          PoReport r = check_po_run(w, po, PoCheckMode::exhaustive(12));
          moves += po.size();
          segments += r.segments_checked;
          if (!r.pass()) ++failed;
        }
      }
    }
  }
  std::ostringstream d;
  d << runs << " run pairs, " << unequal << " state sequences differ, " << failed << " po-runs fail ("
    << segments << " segments of up to 12 moves checked over " << moves << " moves)";
  return {unequal == 0 && failed == 0, d.str()};
}

// ---- criterion 7 ----

Outcome flatten() {
  std::size_t compared = 0, unequal = 0;
  bool ended = false;
  std::ostringstream d;
  for (const std::string f : {"counters", "relay", "conflict"}) {
    Program p = load(f);
    Program flat = flatten_static(p);
    Program reparsed = parse(pretty_print(flat));
    std::size_t count = 0;
    for (std::size_t depth = 1; depth <= 5; ++depth) {
      RunSet a = enumerate_runs(p, {}, depth);
      RunSet b = enumerate_runs(reparsed, {}, depth);
      ++compared;
      if (a.runs != b.runs || a.truncated || b.truncated) ++unequal;
      count = a.runs.size();
      if (f == "conflict") {
        for (const auto& s : a.runs) ended = ended || s.size() < depth + 1;
      }
    }
    d << f << " " << p.agents.size() << " agents/" << count << " runs; ";
  }
  d << compared << " depth comparisons, " << unequal << " unequal; conflicting branch ends: " << (ended ? "yes" : "no");
  return {unequal == 0 && ended, d.str()};
}

// ---- criterion 8 ----

Outcome delegate() {
  std::mt19937_64 rng(8);
  std::size_t runs = 0, mismatched = 0, steps = 0;
  auto compare = [&](const Program& src, const std::map<std::string, Value>& in, const EngineConfig& cfg) {
    Program d = parse(pretty_print(delegate_transform(src)));
    Engine con(src, cfg, in);
    con.run_to_quiescence(10000);
    Engine rec(d, EngineConfig{eager_alternating_schedule(con.trace(), src), 0, cfg.on_inconsistency, 0}, in);
    rec.run_to_quiescence(delegate_state_index(src, con.trace().steps.size()));
    auto syms = signature_symbols(src);
    ++runs;
    bool ok = true;
    for (std::size_t k = 0; k < con.history().size() && ok; ++k) {
      std::size_t j = delegate_state_index(src, k);
      ok = j < rec.history().size() && restrict_state(con.history()[k], syms) == restrict_state(rec.history()[j], syms);
    }
    steps += con.trace().steps.size();
    if (!ok) ++mismatched;
  };
  Program counters = load("counters");
  Program wrapped = wrap_recursive_as_concurrent(load("mergesort"));
  for (const auto& pol : kPolicies) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      EngineConfig cfg{pol, seed, InconsistencyPolicy::halt, 0};
      compare(counters, {}, cfg);
      for (int l = 0; l < 4; ++l) {
        compare(wrapped, {{"unsorted_list", support::to_value(support::random_list(rng, 4, 1000))}}, cfg);
      }
    }
  }
  std::ostringstream d;
  d << runs << " concurrent runs (" << steps << " steps), " << mismatched << " not reproduced";
  return {mismatched == 0, d.str()};
}

// ---- criterion 9 ----

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome replay() {
  auto dir = std::filesystem::temp_directory_path() / ("recasm_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::vector<std::vector<std::string>> configs = {
      {"run", support::corpus("mergesort"), "--input", R"({"unsorted_list":[9,-2,7,7,0,3,1]})", "--policy",
       "random-subset", "--seed", "11", "--max-read-lag", "2"},
      {"run", support::corpus("quicksort"), "--input", R"({"unsorted_list":[5,4,3,2,1]})", "--policy",
       "interleaving", "--seed", "3"},
      {"run", support::corpus("sieve"), "--max-steps", "60"},
      {"run", support::corpus("relay"), "--policy", "random-subset", "--seed", "4"},
  };
  std::size_t identical = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string bytes[2];
    for (int rep = 0; rep < 2; ++rep) {
      auto path = dir / ("trace_" + std::to_string(i) + "_" + std::to_string(rep) + ".jsonl");
      auto args = configs[i];
      args.push_back("--trace");
      args.push_back(path.string());
      std::ostringstream out, err;
      cli::run(args, out, err);
      bytes[rep] = slurp(path);
    }
    if (!bytes[0].empty() && bytes[0] == bytes[1]) ++identical;
  }
  std::filesystem::remove_all(dir);
  std::ostringstream d;
  d << identical << "/" << configs.size() << " configurations byte-identical";
  return {identical == configs.size(), d.str()};
}

}  // namespace

int main() {
  criterion(1, "state difference round trip and minimality", kLimitFact1, fact1);
  criterion(2, "bounded exploration witness", 0, bounded_exploration);
  criterion(3, "isomorphism equivariance", 0, isomorphism_equivariance);
  criterion(4, "sorting and sieve against oracles", kLimitSorting, sorting_and_sieve);
  criterion(5, "call-step discipline and fault injection", 0, postulates);
  criterion(6, "wrapped runs and partial-order runs", kLimitChain, chain);
  criterion(7, "static systems against their flattening", kLimitFlatten, flatten);
  criterion(8, "delegate simulation of concurrent runs", kLimitDelegate, delegate);
  criterion(9, "replay determinism", 0, replay);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}

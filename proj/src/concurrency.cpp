#include "recasm/concurrency.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "recasm/parser.hpp"
#include "recasm/printer.hpp"

namespace recasm {

namespace {

void recheck(Program& p) {
  try {
    check_program(p);
  } catch (const ParseFailure& e) {
    throw TransformError("transformed program does not check: " + e.format("<transform>"));
  }
}

}  // namespace

Program wrap_recursive_as_concurrent(const Program& program) {
  if (program.concurrent) throw TransformError("program is already concurrent");
  Program out = program;
  out.concurrent = true;
  TermPtr guard = Term::apply(
      "and", {Term::apply("active", {}), Term::apply("not", {Term::apply("waiting", {})})});
  for (auto& r : out.rules) r.body = Rule::cond(guard, r.body);
  recheck(out);
  return out;
}

// ---- partial-order runs ----

namespace {

AgentRegistry registry_from_header(const TraceHeader& h) {
  AgentRegistry reg;
  for (const auto& a : h.agents) reg.add(AgentInfo{a.id, a.rule, a.id, std::nullopt, {}, false, false, 0, a.name});
  return reg;
}

StepUpdate recorded_step(const Move& m) {
  StepUpdate s;
  s.updates = m.updates;
  for (const auto& r : m.spawns) s.spawns.push_back(r.spawn);
  std::sort(s.spawns.begin(), s.spawns.end());
  s.terminate = m.terminates;
  return s;
}

using Bits = std::vector<std::uint64_t>;

bool test(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1U; }
void set(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

class PoChecker {
 public:
  PoChecker(const Program& program, const PoRun& run) : program_(program), run_(run), n_(run.size()) {
    const std::size_t words = (n_ + 63) / 64;
    pred_.assign(n_, Bits(words, 0));
    preds_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (run_.precedes(i, j)) {
          set(pred_[j], i);
          preds_[j].push_back(i);
        }
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& s : run_.moves[i].spawns) spawned_by_[s.id.id] = i;
    }
  }

  void order_conditions(PoReport& rep) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (test(pred_[i], i)) {
        fail(rep, rep.irreflexive, "irreflexivity", {i}, i, "move precedes itself");
        return;
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i : preds_[j]) {
        for (std::size_t w = 0; w < pred_[i].size(); ++w) {
          if (pred_[i][w] & ~pred_[j][w]) {
            fail(rep, rep.transitive, "transitivity", {i, j}, j, "order is not transitive");
            return;
          }
        }
      }
    }
    std::map<std::uint64_t, std::vector<std::size_t>> by_agent;
    for (std::size_t i = 0; i < n_; ++i) by_agent[run_.moves[i].agent.id].push_back(i);
    for (const auto& [agent, ms] : by_agent) {
      for (std::size_t a = 0; a < ms.size(); ++a) {
        for (std::size_t b = a + 1; b < ms.size(); ++b) {
          if (!test(pred_[ms[b]], ms[a]) && !test(pred_[ms[a]], ms[b])) {
            fail(rep, rep.sequentiality, "sequentiality", {ms[a], ms[b]}, ms[b],
                 "two moves of agent @" + std::to_string(agent) + " are incomparable");
            return;
          }
        }
      }
    }
  }

  void exhaustive(PoReport& rep, std::size_t limit) {
    std::map<std::vector<std::uint32_t>, State> level;
    level.emplace(std::vector<std::uint32_t>{}, run_.initial);
    std::vector<char> in(n_, 0);
    for (std::size_t k = 0; k < limit && !level.empty(); ++k) {
      std::map<std::vector<std::uint32_t>, State> next;
      for (const auto& [seg, sigma] : level) {
        for (auto i : seg) in[i] = 1;
        for (std::size_t m = 0; m < n_; ++m) {
          if (in[m] || preds_[m].size() > seg.size()) continue;
          if (!std::all_of(preds_[m].begin(), preds_[m].end(), [&](std::size_t p) { return in[p]; })) continue;
          if (auto err = fire_error(sigma, m, in)) {
            fail(rep, rep.coherence, "coherence", seg, m, *err);
            return;
          }
          State after = sigma;
          apply_move(after, run_.moves[m]);
          std::vector<std::uint32_t> grown = seg;
          grown.insert(std::upper_bound(grown.begin(), grown.end(), m), static_cast<std::uint32_t>(m));
          auto [it, fresh] = next.emplace(grown, after);
          if (fresh) {
            ++rep.segments_checked;
          } else if (!(it->second == after)) {
            fail(rep, rep.coherence, "coherence", std::vector<std::uint32_t>(grown), m,
                 "the state of the segment depends on which maximal move comes last");
            return;
          }
        }
        for (auto i : seg) in[i] = 0;
      }
      level = std::move(next);
    }
    rep.complete = n_ <= limit;
  }

  void sampled(PoReport& rep, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
      std::vector<char> in(n_, 0);
      std::vector<std::size_t> missing(n_);
      std::vector<std::size_t> ready;
      for (std::size_t i = 0; i < n_; ++i) {
        missing[i] = preds_[i].size();
        if (missing[i] == 0) ready.push_back(i);
      }
      std::vector<std::vector<std::size_t>> succs(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t i : preds_[j]) succs[i].push_back(j);
      }
      State sigma = run_.initial;
      std::vector<std::uint32_t> seg;
      while (!ready.empty()) {
        std::size_t pick = ready.size() > 1 ? static_cast<std::size_t>(rng() % ready.size()) : 0;
        std::size_t m = ready[pick];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
        if (auto err = fire_error(sigma, m, in)) {
          fail(rep, rep.coherence, "coherence", seg, m, *err);
          return;
        }
        apply_move(sigma, run_.moves[m]);
        in[m] = 1;
        seg.push_back(static_cast<std::uint32_t>(m));
        ++rep.segments_checked;
        for (std::size_t j : succs[m]) {
          if (--missing[j] == 0) ready.push_back(j);
        }
      }
    }
    rep.complete = false;
  }

 private:
  std::optional<std::string> fire_error(const State& sigma, std::size_t m, const std::vector<char>& in) const {
    const Move& mv = run_.moves[m];
    if (auto it = spawned_by_.find(mv.agent.id); it != spawned_by_.end() && !in[it->second]) {
      return "agent @" + std::to_string(mv.agent.id) + " moves before the move that created it";
    }
    if (mv.write_index >= run_.registry_before.size()) return std::string("move outside the recorded run");
    const AgentRegistry& reg = run_.registry_before[mv.write_index];
    if (!reg.contains(mv.agent) || !reg.active(mv.agent)) {
      return "agent @" + std::to_string(mv.agent.id) + " is not an active agent";
    }
    const AgentInfo& info = reg.info(mv.agent);
    const RuleDecl* decl = program_.find_rule(info.rule);
    if (!decl) return "agent @" + std::to_string(mv.agent.id) + " runs unknown rule '" + info.rule + "'";
    EvalContext ctx{sigma, &program_, &reg};
    UpdateSetFamily family = delta(*decl->body, ctx, Environment{{}, info.ambient, mv.agent});
    StepUpdate rec = recorded_step(mv);
    if (!std::binary_search(family.begin(), family.end(), rec)) {
      return "recorded step of agent @" + std::to_string(mv.agent.id) +
             " is not in its update-set family in the segment state";
    }
    return std::nullopt;
  }

  template <class Seg = std::vector<std::size_t>>
  void fail(PoReport& rep, bool& flag, std::string cond, const Seg& seg, std::size_t m, std::string msg) {
    flag = false;
    if (rep.counterexample) return;
    PoCounterexample c;
    c.condition = std::move(cond);
    c.segment.assign(seg.begin(), seg.end());
    c.move = m;
    c.message = std::move(msg);
    rep.counterexample = std::move(c);
  }

  const Program& program_;
  const PoRun& run_;
  std::size_t n_;
  std::vector<Bits> pred_;
  std::vector<std::vector<std::size_t>> preds_;
  std::map<std::uint64_t, std::size_t> spawned_by_;
};

}  // namespace

PoRun extract_po_run(const Trace& trace) {
  PoRun run;
  run.initial = trace.header.initial_state;
  AgentRegistry reg = registry_from_header(trace.header);
  for (const auto& step : trace.steps) {
    if (step.step != run.registry_before.size() + 1) throw TraceFormatError("steps are not numbered consecutively");
    run.registry_before.push_back(reg);
    if (step.inconsistent) continue;
    for (const auto& m : step.moves) {
      run.moves.push_back(m);
      run.steps.push_back(step.step);
      for (const auto& s : m.spawns) {
        if (reg.contains(s.id)) throw TraceFormatError("agent id @" + std::to_string(s.id.id) + " minted twice");
        reg.add(AgentInfo{s.id, s.spawn.rule, s.ambient, s.spawn.caller, {}, false, s.spawn.delegate, step.step, ""});
      }
    }
    for (AgentId a : step.terminated) {
      if (reg.contains(a)) reg.terminate(a);
    }
  }
  return run;
}

PoCheckMode PoCheckMode::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  std::optional<std::size_t> n;
  if (colon != std::string::npos) {
    try {
      n = std::stoull(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad coherence mode '" + text + "'");
    }
  }
  if (kind == "exhaustive") return exhaustive(n.value_or(12));
  if (kind == "sampled") return sampled(n.value_or(50), 0);
  throw std::invalid_argument("unknown coherence mode '" + text + "' (exhaustive[:N] or sampled[:N])");
}

PoReport check_po_run(const Program& program, const PoRun& run, const PoCheckMode& mode) {
  PoReport rep;
  PoChecker checker(program, run);
  checker.order_conditions(rep);
  if (!rep.pass()) return rep;
  if (mode.kind == PoCheckMode::Kind::exhaustive) {
    checker.exhaustive(rep, mode.limit);
  } else {
    checker.sampled(rep, mode.samples, mode.seed);
  }
  return rep;
}

json to_json(const PoReport& r) {
  json ce = nullptr;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    ce = json{{"condition", c.condition}, {"segment", c.segment}, {"message", c.message}};
    ce["move"] = c.move ? json(*c.move) : json(nullptr);
  }
  return json{{"format", kFormatVersion},
              {"kind", "po-run-check"},
              {"pass", r.pass()},
              {"segments_checked", r.segments_checked},
              {"complete", r.complete},
              {"conditions",
               {{"finite_history", r.finite_history},
                {"sequentiality", r.sequentiality},
                {"irreflexive", r.irreflexive},
                {"transitive", r.transitive},
                {"coherence", r.coherence}}},
              {"counterexample", ce}};
}

std::vector<std::pair<std::size_t, std::size_t>> covering_edges(const PoRun& run) {
  const std::size_t n = run.size();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!run.precedes(i, j)) continue;
      bool covered = true;
      for (std::size_t k = 0; k < n && covered; ++k) {
        if (run.precedes(i, k) && run.precedes(k, j)) covered = false;
      }
      if (covered) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

const char* kPalette[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
                          "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};

}  // namespace

std::string export_dot(const PoRun& run) {
  std::map<std::uint64_t, std::size_t> color;
  std::ostringstream out;
  out << "digraph po_run {\n  node [shape=box, style=filled];\n";
  for (std::size_t i = 0; i < run.size(); ++i) {
    const Move& m = run.moves[i];
    auto c = color.emplace(m.agent.id, color.size()).first->second;
    out << "  m" << i << " [label=\"#" << i << " step " << run.steps[i] << "\\n@" << m.agent.id << " " << m.rule
        << "\", fillcolor=\"" << kPalette[c % std::size(kPalette)] << "\"];\n";
  }
  for (auto [a, b] : covering_edges(run)) out << "  m" << a << " -> m" << b << ";\n";
  out << "}\n";
  return out.str();
}

json export_json(const PoRun& run) {
  json moves = json::array();
  for (std::size_t i = 0; i < run.size(); ++i) {
    const Move& m = run.moves[i];
    moves.push_back(json{{"index", i},
                         {"step", run.steps[i]},
                         {"agent", m.agent.id},
                         {"rule", m.rule},
                         {"read_index", m.read_index},
                         {"write_index", m.write_index},
                         {"updates", to_json(m.updates)}});
  }
  json edges = json::array();
  for (auto [a, b] : covering_edges(run)) edges.push_back(json::array({a, b}));
  return json{{"format", kFormatVersion}, {"kind", "po-run"}, {"moves", std::move(moves)}, {"edges", std::move(edges)}};
}

// ---- delegate transformation ----

namespace {

bool is_closed(const Term& t) {
  if (t.kind == Term::Kind::variable) return false;
  for (const auto& a : t.args) {
    if (!is_closed(*a)) return false;
  }
  return true;
}

std::string var_name(std::size_t i) { return "w__" + std::to_string(i); }

class Snapshotter {
 public:
  explicit Snapshotter(std::string rule) : rule_(std::move(rule)) {}

  TermPtr term(const TermPtr& t) {
    if (t->kind != Term::Kind::apply) return t;
    if (is_registry_predicate(t->name)) return Term::variable(var_name(index(t)), t->span);
    if (is_background_op(t->name) || t->name == "list") return Term::apply(t->name, args(t->args), t->span);
    if (!is_closed(*t)) {
      throw TransformError("rule '" + rule_ + "' reads '" + print_term(*t) + "', which is not a closed term");
    }
    return Term::variable(var_name(index(t)), t->span);
  }

  std::vector<TermPtr> args(const std::vector<TermPtr>& ts) {
    std::vector<TermPtr> out;
    for (const auto& a : ts) out.push_back(term(a));
    return out;
  }

  RulePtr rule(const RulePtr& r) {
    switch (r->kind) {
      case Rule::Kind::assign:
        if (r->target->name == "terminated") {
          throw TransformError("rule '" + rule_ + "' assigns 'terminated' itself");
        }
        return Rule::assign(Term::apply(r->target->name, args(r->target->args), r->target->span), term(r->term),
                            r->span);
      case Rule::Kind::cond:
        return Rule::cond(term(r->term), rule(r->children[0]), r->span);
      case Rule::Kind::par:
      case Rule::Kind::choose: {
        std::vector<RulePtr> cs;
        for (const auto& c : r->children) cs.push_back(rule(c));
        return r->kind == Rule::Kind::par ? Rule::par(std::move(cs), r->span) : Rule::choose(std::move(cs), r->span);
      }
      case Rule::Kind::let:
        return Rule::let(r->name, term(r->term), rule(r->children[0]), r->span);
      case Rule::Kind::call:
        return Rule::call(Term::apply(r->target->name, args(r->target->args), r->target->span), r->name + "__caller",
                          args(r->args), r->span);
      case Rule::Kind::forall: {
        ForallDomain d = r->domain;
        if (d.kind == ForallDomain::Kind::relevant_indices) {
          throw TransformError("rule '" + rule_ + "' ranges over relevant_indices(" + d.symbol +
                               "), which has no closed read term");
        }
        d.lo = term(d.lo);
        if (d.hi) d.hi = term(d.hi);
        return Rule::forall(r->name, std::move(d), rule(r->children[0]), r->span);
      }
    }
    return r;
  }

  const std::vector<TermPtr>& snapshots() const { return snaps_; }

 private:
  std::size_t index(const TermPtr& t) {
    for (std::size_t i = 0; i < snaps_.size(); ++i) {
      if (terms_equal(snaps_[i], t)) return i;
    }
    snaps_.push_back(t);
    return snaps_.size() - 1;
  }

  std::string rule_;
  std::vector<TermPtr> snaps_;
};

std::string padded(std::size_t j, std::size_t n) {
  std::size_t width = std::max<std::size_t>(2, std::to_string(n).size());
  std::ostringstream s;
  s << std::setw(static_cast<int>(width)) << std::setfill('0') << j;
  return s.str();
}

}  // namespace

Program delegate_transform(const Program& program) {
  Program out;
  out.concurrent = program.concurrent;
  out.shared = program.shared;
  out.shared_arity = program.shared_arity;
  out.observe = program.observe;

  std::set<std::string> names;
  for (const auto& r : program.rules) names.insert(r.name);
  std::map<std::string, RuleDecl> callers;
  for (const auto& r : program.rules) {
    if (r.is_delegate) throw TransformError("rule '" + r.name + "' is already a delegate");
    for (const char* suffix : {"__caller", "__step", "__in", "__out"}) {
      if (names.count(r.name + suffix)) throw TransformError("rule name '" + r.name + suffix + "' is taken");
    }
    Snapshotter snap(r.name);
    RulePtr body = snap.rule(r.body);
    const auto& ts = snap.snapshots();
    const std::string in = r.name + "__in";
    const std::string outsym = r.name + "__out";
    for (std::size_t i = ts.size(); i-- > 0;) {
      body = Rule::let(var_name(i),
                       Term::apply("assoc", {Term::apply(in, {}), Term::constant(Value(std::int64_t(i)))}), body);
    }
    RuleDecl step{r.name + "__step", {in}, outsym,
                  Rule::par({body, Rule::assign(Term::apply("terminated", {}), Term::constant(Value(true)))}),
                  false, true, r.span};

    std::vector<TermPtr> pairs;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      pairs.push_back(Term::apply("list", {Term::constant(Value(std::int64_t(i))), ts[i]}));
    }
    RuleDecl caller{r.name + "__caller", r.params, r.output,
                    Rule::call(Term::apply(outsym, {}), step.name, {Term::apply("list", std::move(pairs))}, r.span),
                    r.is_main, false, r.span};
    callers.emplace(r.name, caller);
    out.rules.push_back(std::move(caller));
    out.rules.push_back(std::move(step));
  }

  if (program.is_static()) {
    std::vector<RulePtr> boot;
    boot.push_back(Rule::assign(Term::apply("boot__done", {}), Term::constant(Value(true))));
    const std::size_t n = program.agents.size();
    for (std::size_t j = 1; j <= n; ++j) {
      RuleDecl copy = callers.at(program.agents[j - 1].rule);
      copy.name = "boot__a" + padded(j, n);
      copy.output.clear();
      copy.is_main = false;
      boot.push_back(Rule::call(Term::apply("boot__slot", {Term::constant(Value(std::int64_t(j)))}), copy.name, {}));
      out.rules.push_back(std::move(copy));
    }
    TermPtr fresh = Term::apply("=", {Term::apply("boot__done", {}), Term::constant(Value())});
    out.rules.push_back(RuleDecl{"boot", {}, "", Rule::cond(fresh, Rule::par(std::move(boot))), true, false, {}});
  }
  recheck(out);
  return out;
}

SchedulerPolicy eager_alternating_schedule(const Trace& concurrent, const Program& source) {
  std::vector<ScriptEntry> entries;
  if (source.is_static()) {
    ScriptEntry boot;
    boot.agents = std::vector<AgentId>{AgentId{0}};
    entries.push_back(std::move(boot));
  }
  std::uint64_t next_delegate = kDelegateIdBase;
  for (const auto& step : concurrent.steps) {
    std::vector<const Move*> moves;
    for (const auto& m : step.moves) moves.push_back(&m);
    std::sort(moves.begin(), moves.end(), [](const Move* a, const Move* b) { return a->agent < b->agent; });
    ScriptEntry callers;
    callers.agents = std::vector<AgentId>{};
    ScriptEntry delegates;
    delegates.delegates_only = true;
    for (const Move* m : moves) {
      callers.agents->push_back(m->agent);
      delegates.choices[next_delegate++] = m->choice;
    }
    entries.push_back(std::move(callers));
    entries.push_back(std::move(delegates));
  }
  return SchedulerPolicy::scripted(std::move(entries));
}

State restrict_state(const State& state, const std::set<std::string>& symbols) {
  State out(state.signature_ptr());
  for (const auto& [loc, v] : state.store()) {
    if (symbols.count(loc.symbol)) out.assign(loc, v);
  }
  for (const auto& [key, target] : state.aliases()) {
    if (symbols.count(key.second)) out.add_alias(key.first, key.second, target);
  }
  return out;
}

std::set<std::string> signature_symbols(const Program& program) {
  std::set<std::string> out;
  if (program.signature) {
    for (const auto& [name, info] : program.signature->symbols()) out.insert(name);
  }
  return out;
}

// ---- static systems ----

namespace {

bool mentions(const Rule& r, const std::function<bool(const Term&)>& pred) {
  std::function<bool(const TermPtr&)> in_term = [&](const TermPtr& t) {
    if (!t) return false;
    if (pred(*t)) return true;
    return std::any_of(t->args.begin(), t->args.end(), in_term);
  };
  if (r.kind == Rule::Kind::call) return true;
  if (in_term(r.target) || in_term(r.term) || in_term(r.domain.lo) || in_term(r.domain.hi)) return true;
  if (std::any_of(r.args.begin(), r.args.end(), in_term)) return true;
  return std::any_of(r.children.begin(), r.children.end(), [&](const RulePtr& c) { return mentions(*c, pred); });
}

}  // namespace

Program flatten_static(const Program& program) {
  if (!program.is_static()) throw TransformError("flatten needs a static system (agent declarations)");
  if (program.signature) {
    for (const auto& [name, info] : program.signature->symbols()) {
      if (!info.shared) throw TransformError("symbol '" + name + "' is not shared");
    }
  }
  for (const auto& a : program.agents) {
    const Rule& body = *program.rule(a.rule).body;
    bool bad = mentions(body, [](const Term& t) {
      return t.kind == Term::Kind::apply && (is_registry_predicate(t.name) || t.name == "terminated");
    });
    if (bad) throw TransformError("rule '" + a.rule + "' calls, terminates, or reads the agent registry");
  }
  const std::size_t n = program.agents.size();
  if (n > 16) throw TransformError("too many agents to flatten");
  std::vector<RulePtr> choices;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<RulePtr> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1U) members.push_back(program.rule(program.agents[j].rule).body);
    }
    choices.push_back(members.size() == 1 ? members.front() : Rule::par(std::move(members)));
  }
  Program out;
  out.shared = program.shared;
  out.shared_arity = program.shared_arity;
  out.observe = program.observe;
  std::string name = "flat";
  while (program.find_rule(name)) name += "_";
  out.rules.push_back(RuleDecl{name, {}, "", Rule::choose(std::move(choices)), true, false, {}});
  for (const auto& a : program.agents) {
    RuleDecl r = program.rule(a.rule);
    if (!out.find_rule(r.name)) out.rules.push_back(std::move(r));
  }
  recheck(out);
  return out;
}

namespace {

struct Enumerator {
  const Program& program;
  RunState init;
  std::size_t depth;
  std::size_t max_runs;
  RunSet result;

  std::vector<UpdateSet> successors(const State& s) {
    EvalContext ctx{s, &program, &init.registry};
    std::vector<UpdateSetFamily> fams;
    std::vector<AgentId> agents = init.registry.agents();
    for (AgentId a : agents) {
      const AgentInfo& info = init.registry.info(a);
      UpdateSetFamily f = delta(*program.rule(info.rule).body, ctx, Environment{{}, info.ambient, a});
      for (const auto& m : f) {
        if (!m.spawns.empty() || m.terminate) {
          throw SpecError("enumerate_runs covers programs without calls or 'terminated'");
        }
      }
      fams.push_back(std::move(f));
    }
    std::set<UpdateSet> out;
    if (!program.is_static()) {
      for (const auto& m : fams.front()) out.insert(m.updates);
      return {out.begin(), out.end()};
    }
    const std::size_t n = fams.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<UpdateSet> acc{UpdateSet{}};
      for (std::size_t j = 0; j < n; ++j) {
        if (!(mask >> j & 1U)) continue;
        std::vector<UpdateSet> grown;
        for (const auto& u : acc) {
          for (const auto& m : fams[j]) {
            UpdateSet v = u;
            v.merge(m.updates);
            grown.push_back(std::move(v));
          }
        }
        acc = std::move(grown);
      }
      out.insert(acc.begin(), acc.end());
    }
    return {out.begin(), out.end()};
  }

  void walk(const State& s, std::vector<std::string>& seq) {
    if (result.truncated) return;
    if (seq.size() > depth) {
      emit(seq);
      return;
    }
    for (const auto& u : successors(s)) {
      if (!u.consistent()) {
        // This choice clashes: its branch ends here.
        emit(seq);
        continue;
      }
      State next = s;
      for (const auto& x : u) next.assign(x.loc, x.value);
      seq.push_back(canonical(next));
      walk(next, seq);
      seq.pop_back();
    }
  }

  void emit(const std::vector<std::string>& seq) {
    if (result.runs.size() >= max_runs) {
      result.truncated = true;
      return;
    }
    result.runs.insert(seq);
  }
};

}  // namespace

RunSet enumerate_runs(const Program& program, const std::map<std::string, Value>& inputs, std::size_t depth,
                      std::size_t max_runs) {
  Enumerator e{program, init_run(program, inputs), depth, max_runs, {}};
  std::vector<std::string> seq{canonical(e.init.state)};
  e.walk(e.init.state, seq);
  return std::move(e.result);
}

json to_json(const RunSet& r) {
  json runs = json::array();
  for (const auto& seq : r.runs) {
    json states = json::array();
    for (const auto& s : seq) states.push_back(json::parse(s));
    runs.push_back(std::move(states));
  }
  return json{{"format", kFormatVersion},
              {"kind", "runs"},
              {"count", r.runs.size()},
              {"truncated", r.truncated},
              {"runs", std::move(runs)}};
}

}  // namespace recasm

#include "recasm/runtime.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "recasm/parser.hpp"
#include "recasm/printer.hpp"

namespace recasm {

std::string SchedulerPolicy::name() const {
  switch (kind) {
    case Kind::synchronous:
      return "synchronous";
    case Kind::interleaving:
      return "interleaving";
    case Kind::random_subset:
      return "random-subset";
    case Kind::script:
      return "script";
  }
  return "?";
}

SchedulerPolicy SchedulerPolicy::parse(const std::string& name) {
  if (name == "synchronous" || name == "sync") return synchronous();
  if (name == "interleaving") return interleaving();
  if (name == "random-subset" || name == "random_subset") return random_subset();
  throw SpecError("unknown scheduler policy '" + name + "'");
}

RunState init_run(const Program& program, const std::map<std::string, Value>& inputs) {
  RunState run;
  run.state = State(program.signature ? program.signature : std::make_shared<const Signature>());
  if (program.is_static()) {
    for (size_t j = 0; j < program.agents.size(); ++j) {
      AgentInfo a;
      a.id = AgentId{j + 1};
      a.ambient = a.id;
      a.rule = program.agents[j].rule;
      a.name = program.agents[j].name;
      run.registry.add(std::move(a));
    }
    for (const auto& [name, v] : inputs) {
      const SymbolInfo* info = run.state.signature().find(name);
      if (!info || !info->shared || info->arity != 0) {
        throw SpecError("input '" + name + "' is not a 0-ary shared symbol of the system");
      }
      run.state.assign(Location{std::nullopt, name, {}}, v);
    }
    return run;
  }
  const RuleDecl& main = program.rule(program.main);
  AgentInfo a0;
  a0.id = AgentId{0};
  a0.ambient = a0.id;
  a0.rule = main.name;
  run.registry.add(std::move(a0));
  for (const auto& [name, v] : inputs) {
    if (std::find(main.params.begin(), main.params.end(), name) == main.params.end()) {
      throw SpecError("input '" + name + "' is not an input symbol of main rule '" + main.name + "'");
    }
    run.state.assign(Location{AgentId{0}, name, {}}, v);
  }
  return run;
}

bool active(AgentId a, const RunState& run) { return run.registry.active(a); }
bool waiting(AgentId a, const RunState& run) { return run.registry.waiting(a); }

std::string program_hash(const Program& program) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : pretty_print(program)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Engine::Engine(Program program, EngineConfig config, const std::map<std::string, Value>& inputs)
    : program_(std::move(program)), config_(std::move(config)), rng_(config_.seed) {
  if (!program_.signature) check_program(program_);
  run_ = init_run(program_, inputs);
  history_.push_back(run_.state);

  TraceHeader& h = trace_.header;
  h.program_hash = program_hash(program_);
  h.seed = config_.seed;
  h.policy = config_.policy.name();
  h.on_inconsistency = config_.on_inconsistency == InconsistencyPolicy::halt ? "halt" : "skip";
  h.max_read_lag = config_.max_read_lag;
  h.branching_bound = program_.branching_bound();
  for (const auto& r : program_.rules) {
    h.rules[r.name] = RuleSummary{r.params, r.output, r.is_delegate, count_calls(*r.body)};
  }
  h.shared = program_.shared;
  for (AgentId a : run_.registry.agents()) {
    const AgentInfo& info = run_.registry.info(a);
    h.agents.push_back({a, info.rule, info.name});
  }
  h.initial_state = run_.state;
}

UpdateSetFamily Engine::family_of(AgentId agent, const State& state) const {
  const AgentInfo& info = run_.registry.info(agent);
  const RuleDecl& decl = program_.rule(info.rule);
  EvalContext ctx{state, &program_, &run_.registry};
  return delta(*decl.body, ctx, Environment{{}, info.ambient, agent});
}

std::vector<AgentId> Engine::candidates() const {
  std::vector<AgentId> out;
  for (AgentId a : run_.registry.active_agents()) {
    if (!run_.registry.waiting(a)) out.push_back(a);
  }
  return out;
}

std::vector<AgentId> Engine::select(const std::vector<AgentId>& cands, const ScriptEntry* entry) {
  if (entry) {
    if (entry->agents) {
      std::vector<AgentId> sel = *entry->agents;
      std::sort(sel.begin(), sel.end());
      sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
      for (AgentId a : sel) {
        if (!run_.registry.contains(a) || !run_.registry.active(a)) {
          throw SchedulerError("scheduled agent @" + std::to_string(a.id) + " is not active");
        }
        if (run_.registry.waiting(a)) {
          throw SchedulerError("scheduled agent @" + std::to_string(a.id) + " is waiting");
        }
      }
      return sel;
    }
    if (entry->delegates_only) {
      std::vector<AgentId> sel;
      for (AgentId a : cands) {
        if (run_.registry.info(a).delegate) sel.push_back(a);
      }
      return sel;
    }
    return cands;
  }
  switch (config_.policy.kind) {
    case SchedulerPolicy::Kind::synchronous:
    case SchedulerPolicy::Kind::script:
      return cands;
    case SchedulerPolicy::Kind::interleaving:
      return {cands.size() > 1 ? cands[draw(cands.size())] : cands.front()};
    case SchedulerPolicy::Kind::random_subset: {
      if (cands.size() == 1) return cands;
      std::vector<AgentId> sel;
      for (AgentId a : cands) {
        if (rng_() & 1) sel.push_back(a);
      }
      if (sel.empty()) sel.push_back(cands[draw(cands.size())]);
      return sel;
    }
  }
  return cands;
}

namespace {

bool all_trivial(const UpdateSetFamily& family, const State& state, bool ignore_terminate) {
  for (const auto& m : family) {
    if (!m.spawns.empty() || (m.terminate && !ignore_terminate)) return false;
    for (const auto& u : m.updates) {
      if (!is_trivial(state, u)) return false;
    }
  }
  return true;
}

bool has_active_callee_subtree(const AgentRegistry& reg, AgentId a) {
  for (AgentId c : reg.info(a).children) {
    if (reg.info(c).delegate) continue;
    if (reg.active(c) || reg.has_active_descendant(c)) return true;
  }
  return false;
}

}  // namespace

const StepRecord& Engine::step() {
  if (run_.status != RunStatus::running) {
    idle_ = StepRecord{};
    idle_.status = run_.status;
    return idle_;
  }
  std::vector<AgentId> cands = candidates();
  if (cands.empty()) {
    if (run_.registry.active_agents().empty()) {
      run_.status = RunStatus::quiescent;
    } else {
      run_.status = RunStatus::halted;
      run_.halt_reason = "no schedulable agent";
    }
    idle_ = StepRecord{};
    idle_.status = run_.status;
    return idle_;
  }

  const std::size_t i = run_.step_index;
  const ScriptEntry* entry = nullptr;
  if (config_.policy.kind == SchedulerPolicy::Kind::script && i < config_.policy.script.size()) {
    entry = &config_.policy.script[i];
  }
  std::vector<AgentId> selected = select(cands, entry);

  struct Pending {
    AgentId agent;
    StepUpdate chosen;
    bool trivial = false;
    bool trivial_ignoring_terminate = false;
    Move move;
  };
  std::vector<Pending> pending;
  const State& current = run_.state;
  UpdateSet combined;

  for (AgentId a : selected) {
    const AgentInfo& info = run_.registry.info(a);
    std::size_t j = i;
    if (entry && entry->reads.count(a.id)) {
      j = entry->reads.at(a.id);
      if (j > i) throw SchedulerError("pinned read index in the future");
    } else if (config_.max_read_lag > 0) {
      std::size_t lo = i - std::min(config_.max_read_lag, i);
      if (auto it = last_write_.find(a.id); it != last_write_.end()) lo = std::max(lo, it->second + 1);
      lo = std::max(lo, info.created_step);
      lo = std::min(lo, i);
      std::size_t n = i - lo + 1;
      j = n > 1 ? lo + draw(n) : i;
    }
    UpdateSetFamily family = family_of(a, history_[j]);
    std::size_t choice = 0;
    if (entry && entry->choices.count(a.id)) {
      choice = entry->choices.at(a.id);
      if (choice >= family.size()) throw SchedulerError("pinned choice out of range");
    } else if (family.size() > 1) {
      choice = draw(family.size());
    }
    Pending p;
    p.agent = a;
    p.chosen = family[choice];
    p.trivial = all_trivial(family, current, false);
    p.trivial_ignoring_terminate = all_trivial(family, current, true);
    p.move.agent = a;
    p.move.ambient = info.ambient;
    p.move.rule = info.rule;
    p.move.read_index = j;
    p.move.write_index = i;
    p.move.choice = choice;
    p.move.family_size = family.size();
    p.move.updates = p.chosen.updates;
    p.move.terminates = p.chosen.terminate;
    combined.merge(p.chosen.updates);
    pending.push_back(std::move(p));
  }

  StepRecord rec;
  rec.step = i + 1;
  rec.combined = combined;
  for (AgentId a : selected) last_write_[a.id] = i;

  if (!combined.consistent()) {
    rec.inconsistent = true;
    rec.clashes = combined.clashes();
    for (auto& p : pending) rec.moves.push_back(std::move(p.move));
    if (config_.on_inconsistency == InconsistencyPolicy::halt) {
      run_.status = RunStatus::halted;
      run_.halt_reason = "inconsistent update set";
      run_.clashes = rec.clashes;
    } else {
      ++run_.step_index;
      history_.push_back(run_.state);
    }
    rec.status = run_.status;
    trace_.steps.push_back(std::move(rec));
    return trace_.steps.back();
  }

  State next = run_.state;
  for (const auto& u : combined) next.assign(u.loc, u.value);

  for (auto& p : pending) {
    for (const Spawn& s : p.chosen.spawns) {
      const RuleDecl& callee = program_.rule(s.rule);
      AgentInfo info;
      info.id = run_.registry.mint(callee.is_delegate);
      info.ambient = callee.is_delegate ? s.caller : info.id;
      info.rule = s.rule;
      info.caller = s.caller;
      info.delegate = callee.is_delegate;
      info.created_step = i + 1;
      for (size_t k = 0; k < callee.params.size() && k < s.inputs.size(); ++k) {
        Location loc{info.ambient, callee.params[k], {}};
        next.assign(loc, s.inputs[k]);
        p.move.initialize.insert({loc, s.inputs[k]});
      }
      if (!callee.output.empty()) {
        Location slot{info.ambient, callee.output, {}};
        if (slot != s.output) {
          next.add_alias(info.ambient, callee.output, s.output);
          p.move.aliases.push_back({info.ambient, callee.output, next.resolve(slot)});
        }
      }
      p.move.spawns.push_back({info.id, info.ambient, s});
      run_.registry.add(std::move(info));
    }
  }

  std::set<AgentId> terminated;
  for (auto& p : pending) {
    const AgentInfo& info = run_.registry.info(p.agent);
    if (p.chosen.terminate) {
      terminated.insert(p.agent);
    } else if (!info.delegate && p.trivial && !run_.registry.has_active_descendant(p.agent)) {
      terminated.insert(p.agent);
    }
    // A delegate whose step was a no-op reports its caller's fixpoint.
    if (info.delegate && info.caller && p.trivial_ignoring_terminate &&
        run_.registry.active(*info.caller) && !has_active_callee_subtree(run_.registry, *info.caller)) {
      terminated.insert(*info.caller);
    }
  }
  for (AgentId a : terminated) {
    run_.registry.terminate(a);
    rec.terminated.push_back(a);
  }

  for (const auto& u : combined) {
    if (std::find(program_.observe.begin(), program_.observe.end(), u.loc.symbol) != program_.observe.end()) {
      observations_.push_back({i + 1, u.loc, u.value});
    }
  }

  run_.state = std::move(next);
  ++run_.step_index;
  history_.push_back(run_.state);
  if (run_.registry.active_agents().empty()) run_.status = RunStatus::quiescent;

  for (auto& p : pending) rec.moves.push_back(std::move(p.move));
  rec.status = run_.status;
  trace_.steps.push_back(std::move(rec));
  return trace_.steps.back();
}

RunStatus Engine::run_to_quiescence(std::size_t max_steps) {
  for (std::size_t k = 0; k < max_steps && run_.status == RunStatus::running; ++k) step();
  if (run_.status == RunStatus::running && candidates().empty()) step();
  return run_.status;
}

SchedulerPolicy replay_policy(const Trace& trace) {
  std::vector<ScriptEntry> entries;
  for (const auto& s : trace.steps) {
    ScriptEntry e;
    e.agents = std::vector<AgentId>{};
    for (const auto& m : s.moves) {
      e.agents->push_back(m.agent);
      e.choices[m.agent.id] = m.choice;
      e.reads[m.agent.id] = m.read_index;
    }
    entries.push_back(std::move(e));
  }
  return SchedulerPolicy::scripted(std::move(entries));
}

// ---- postulate assertions ----

namespace {

std::string at(AgentId a) { return "@" + std::to_string(a.id); }

bool descends_from(const AgentRegistry& reg, AgentId x, AgentId ancestor) {
  if (!reg.contains(x)) return false;
  std::optional<AgentId> c = reg.info(x).caller;
  while (c) {
    if (*c == ancestor) return true;
    if (!reg.contains(*c)) return false;
    c = reg.info(*c).caller;
  }
  return false;
}

}  // namespace

AssertionReport assert_postulates(const Trace& trace) {
  AssertionReport rep;
  AgentRegistry reg;
  std::map<std::uint64_t, Location> output_target;  // by ambient
  std::set<std::uint64_t> seen;
  for (const auto& a : trace.header.agents) {
    reg.add(AgentInfo{a.id, a.rule, a.id, std::nullopt, {}, false, false, 0, a.name});
    seen.insert(a.id.id);
  }
  const std::size_t m = trace.header.branching_bound;
  std::set<std::string> shared(trace.header.shared.begin(), trace.header.shared.end());

  for (const auto& step : trace.steps) {
    ++rep.steps_checked;
    auto report = [&](std::string kind, std::string msg) {
      rep.violations.push_back({step.step, std::move(kind), std::move(msg)});
    };
    std::set<std::uint64_t> stepped;
    for (const auto& mv : step.moves) {
      if (!stepped.insert(mv.agent.id).second) report("duplicate-move", "agent " + at(mv.agent) + " moves twice");
      if (!reg.contains(mv.agent)) {
        report("unknown-agent", "agent " + at(mv.agent) + " is not registered");
        continue;
      }
      const AgentInfo& info = reg.info(mv.agent);
      if (!reg.active(mv.agent)) {
        report("inactive-agent-stepped", "agent " + at(mv.agent) + " steps after terminating");
      } else if (reg.waiting(mv.agent)) {
        report("waiting-agent-stepped", "agent " + at(mv.agent) + " steps while waiting for a callee");
      }
      if (info.ambient != mv.ambient) {
        report("wrong-ambient", "agent " + at(mv.agent) + " executes in ambient " + at(mv.ambient));
      }
      if (mv.spawns.size() > m) {
        report("branching", "agent " + at(mv.agent) + " issues " + std::to_string(mv.spawns.size()) +
                                " calls in one step, bound is " + std::to_string(m));
      }

      std::map<std::uint64_t, const SpawnRecord*> new_ambients;
      for (const auto& s : mv.spawns) new_ambients[s.ambient.id] = &s;

      for (const auto& u : mv.updates) {
        const Location& loc = u.loc;
        if (!loc.ambient) {
          if (!shared.count(loc.symbol)) report("unscoped-write", "write to " + loc.to_string() + " without ambient");
          continue;
        }
        if (*loc.ambient == mv.ambient) continue;
        auto out = output_target.find(mv.ambient.id);
        if (out != output_target.end() && out->second == loc) continue;
        AgentId owner = *loc.ambient;
        bool callee = new_ambients.count(owner.id) > 0 || descends_from(reg, owner, mv.ambient);
        if (callee) {
          report("caller-writes-callee-local",
                 "agent " + at(mv.agent) + " writes " + loc.to_string() + " in a callee's ambient");
        } else {
          report("foreign-write", "agent " + at(mv.agent) + " writes " + loc.to_string() +
                                      " outside its ambient and output slot");
        }
      }

      for (const auto& u : mv.initialize) {
        const SpawnRecord* s = u.loc.ambient && new_ambients.count(u.loc.ambient->id)
                                   ? new_ambients.at(u.loc.ambient->id)
                                   : nullptr;
        bool ok = false;
        if (s) {
          auto r = trace.header.rules.find(s->spawn.rule);
          ok = r != trace.header.rules.end() &&
               std::find(r->second.params.begin(), r->second.params.end(), u.loc.symbol) != r->second.params.end();
        }
        if (!ok) report("bad-initialize", "initialization of " + u.loc.to_string() + " is not a callee input");
      }

      for (const auto& s : mv.spawns) {
        if (!seen.insert(s.id.id).second) report("reused-agent-id", "agent id " + at(s.id) + " minted twice");
        if (s.spawn.caller != mv.ambient) {
          report("bad-caller", "call recorded with caller " + at(s.spawn.caller) + " by agent " + at(mv.agent));
        }
      }
    }

    if (step.inconsistent) continue;
    for (const auto& mv : step.moves) {
      for (const auto& s : mv.spawns) {
        if (reg.contains(s.id)) continue;
        AgentInfo c{s.id, s.spawn.rule, s.ambient, s.spawn.caller, {}, false, s.spawn.delegate, step.step, ""};
        reg.add(std::move(c));
        auto r = trace.header.rules.find(s.spawn.rule);
        if (!s.spawn.delegate && r != trace.header.rules.end() && !r->second.output.empty()) {
          output_target[s.ambient.id] = s.spawn.output;
        }
      }
    }
    for (AgentId a : step.terminated) {
      if (reg.contains(a)) reg.terminate(a);
    }
  }
  return rep;
}

json to_json(const AssertionReport& r) {
  json vs = json::array();
  for (const auto& v : r.violations) vs.push_back(json{{"step", v.step}, {"kind", v.kind}, {"message", v.message}});
  return json{{"format", kFormatVersion},
              {"kind", "postulates"},
              {"pass", r.ok()},
              {"steps_checked", r.steps_checked},
              {"violations", std::move(vs)}};
}

}  // namespace recasm

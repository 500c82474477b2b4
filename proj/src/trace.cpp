#include "recasm/trace.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace recasm {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::running:
      return "running";
    case RunStatus::halted:
      return "halted";
    case RunStatus::quiescent:
      return "quiescent";
  }
  return "?";
}

namespace {

RunStatus status_from(const std::string& s) {
  if (s == "running") return RunStatus::running;
  if (s == "halted") return RunStatus::halted;
  if (s == "quiescent") return RunStatus::quiescent;
  throw TraceFormatError("unknown status '" + s + "'");
}

json values_json(const std::vector<Value>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back(to_json(v));
  return arr;
}

std::vector<Value> values_from(const json& j) {
  std::vector<Value> out;
  for (const auto& v : j) out.push_back(value_from_json(v));
  return out;
}

json locations_json(const std::vector<Location>& ls) {
  json arr = json::array();
  for (const auto& l : ls) arr.push_back(to_json(l));
  return arr;
}

}  // namespace

json to_json(const Move& m) {
  json aliases = json::array();
  for (const auto& a : m.aliases) {
    aliases.push_back(json{{"agent", a.agent.id}, {"symbol", a.symbol}, {"target", to_json(a.target)}});
  }
  json spawns = json::array();
  for (const auto& s : m.spawns) {
    spawns.push_back(json{{"id", s.id.id},
                          {"ambient", s.ambient.id},
                          {"rule", s.spawn.rule},
                          {"delegate", s.spawn.delegate},
                          {"caller", s.spawn.caller.id},
                          {"inputs", values_json(s.spawn.inputs)},
                          {"output", to_json(s.spawn.output)}});
  }
  return json{{"agent", m.agent.id},
              {"ambient", m.ambient.id},
              {"rule", m.rule},
              {"read_index", m.read_index},
              {"write_index", m.write_index},
              {"choice", m.choice},
              {"family_size", m.family_size},
              {"updates", to_json(m.updates)},
              {"initialize", to_json(m.initialize)},
              {"aliases", std::move(aliases)},
              {"spawns", std::move(spawns)},
              {"terminates", m.terminates}};
}

namespace {

Move move_from_json(const json& j) {
  Move m;
  m.agent = AgentId{j.at("agent").get<std::uint64_t>()};
  m.ambient = AgentId{j.at("ambient").get<std::uint64_t>()};
  m.rule = j.at("rule").get<std::string>();
  if (!j.contains("read_index") || !j.contains("write_index")) {
    throw TraceFormatError("move without read/write indices");
  }
  m.read_index = j.at("read_index").get<std::size_t>();
  m.write_index = j.at("write_index").get<std::size_t>();
  m.choice = j.value("choice", std::size_t{0});
  m.family_size = j.value("family_size", std::size_t{1});
  m.updates = update_set_from_json(j.at("updates"));
  if (j.contains("initialize")) m.initialize = update_set_from_json(j.at("initialize"));
  if (j.contains("aliases")) {
    for (const auto& a : j.at("aliases")) {
      m.aliases.push_back({AgentId{a.at("agent").get<std::uint64_t>()}, a.at("symbol").get<std::string>(),
                           location_from_json(a.at("target"))});
    }
  }
  if (j.contains("spawns")) {
    for (const auto& s : j.at("spawns")) {
      SpawnRecord r;
      r.id = AgentId{s.at("id").get<std::uint64_t>()};
      r.ambient = AgentId{s.at("ambient").get<std::uint64_t>()};
      r.spawn.rule = s.at("rule").get<std::string>();
      r.spawn.delegate = s.value("delegate", false);
      r.spawn.caller = AgentId{s.at("caller").get<std::uint64_t>()};
      r.spawn.inputs = values_from(s.at("inputs"));
      r.spawn.output = location_from_json(s.at("output"));
      m.spawns.push_back(std::move(r));
    }
  }
  m.terminates = j.value("terminates", false);
  return m;
}

}  // namespace

json to_json(const StepRecord& s) {
  json moves = json::array();
  for (const auto& m : s.moves) moves.push_back(to_json(m));
  json terminated = json::array();
  for (AgentId a : s.terminated) terminated.push_back(a.id);
  return json{{"format", kFormatVersion},
              {"kind", "step"},
              {"step", s.step},
              {"moves", std::move(moves)},
              {"combined", to_json(s.combined)},
              {"inconsistent", s.inconsistent},
              {"clashes", locations_json(s.clashes)},
              {"terminated", std::move(terminated)},
              {"status", to_string(s.status)}};
}

StepRecord step_from_json(const json& j) {
  if (j.value("kind", "") != "step") throw TraceFormatError("expected a step record");
  StepRecord s;
  s.step = j.at("step").get<std::size_t>();
  for (const auto& m : j.at("moves")) s.moves.push_back(move_from_json(m));
  s.combined = update_set_from_json(j.at("combined"));
  s.inconsistent = j.value("inconsistent", false);
  if (j.contains("clashes")) {
    for (const auto& l : j.at("clashes")) s.clashes.push_back(location_from_json(l));
  }
  for (const auto& a : j.at("terminated")) s.terminated.push_back(AgentId{a.get<std::uint64_t>()});
  s.status = status_from(j.at("status").get<std::string>());
  return s;
}

json to_json(const TraceHeader& h) {
  json rules = json::object();
  for (const auto& [name, r] : h.rules) {
    rules[name] = json{{"params", r.params}, {"output", r.output}, {"delegate", r.delegate}, {"calls", r.calls}};
  }
  json agents = json::array();
  for (const auto& a : h.agents) agents.push_back(json{{"id", a.id.id}, {"rule", a.rule}, {"name", a.name}});
  return json{{"format", kFormatVersion},
              {"kind", "header"},
              {"program_hash", h.program_hash},
              {"seed", h.seed},
              {"policy", h.policy},
              {"on_inconsistency", h.on_inconsistency},
              {"max_read_lag", h.max_read_lag},
              {"branching_bound", h.branching_bound},
              {"rules", std::move(rules)},
              {"shared", h.shared},
              {"agents", std::move(agents)},
              {"initial_state", to_json(h.initial_state)}};
}

TraceHeader header_from_json(const json& j) {
  if (j.value("kind", "") != "header") throw TraceFormatError("expected a header record");
  if (j.value("format", 0) != kFormatVersion) throw TraceFormatError("unsupported trace format");
  TraceHeader h;
  h.program_hash = j.at("program_hash").get<std::string>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.policy = j.at("policy").get<std::string>();
  h.on_inconsistency = j.value("on_inconsistency", "halt");
  h.max_read_lag = j.value("max_read_lag", std::size_t{0});
  h.branching_bound = j.at("branching_bound").get<std::size_t>();
  for (const auto& [name, r] : j.at("rules").items()) {
    RuleSummary s;
    s.params = r.at("params").get<std::vector<std::string>>();
    s.output = r.at("output").get<std::string>();
    s.delegate = r.value("delegate", false);
    s.calls = r.value("calls", std::size_t{0});
    h.rules.emplace(name, std::move(s));
  }
  h.shared = j.value("shared", std::vector<std::string>{});
  for (const auto& a : j.at("agents")) {
    h.agents.push_back({AgentId{a.at("id").get<std::uint64_t>()}, a.at("rule").get<std::string>(),
                        a.value("name", "")});
  }
  h.initial_state = state_from_json(j.at("initial_state"));
  return h;
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << to_json(trace.header).dump() << '\n';
  for (const auto& s : trace.steps) out << to_json(s).dump() << '\n';
}

std::string trace_to_jsonl(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      if (!have_header) {
        t.header = header_from_json(j);
        have_header = true;
      } else {
        t.steps.push_back(step_from_json(j));
      }
    } catch (const TraceFormatError& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw TraceFormatError("empty trace");
  return t;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot open " + path);
  return read_trace(in);
}

void apply_move(State& state, const Move& m) {
  for (const auto& u : m.updates) state.assign(u.loc, u.value);
  for (const auto& u : m.initialize) state.assign(u.loc, u.value);
  for (const auto& a : m.aliases) state.add_alias(a.agent, a.symbol, a.target);
}

}  // namespace recasm

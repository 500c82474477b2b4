#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "recasm/ast.hpp"
#include "recasm/registry.hpp"
#include "recasm/semantics.hpp"
#include "recasm/trace.hpp"

namespace recasm {

/// The policy asked for an agent that is not active, or is waiting.
class SchedulerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScriptEntry {
  std::optional<std::vector<AgentId>> agents;  // nullopt: every candidate
  bool delegates_only = false;                  // restrict the candidates to delegates
  std::map<std::uint64_t, std::size_t> choices;  // pinned family indices per agent
  std::map<std::uint64_t, std::size_t> reads;    // pinned read indices per agent
};

struct SchedulerPolicy {
  enum class Kind { synchronous, interleaving, script, random_subset };

  Kind kind = Kind::synchronous;
  std::vector<ScriptEntry> script;  // once exhausted, steps run synchronously

  static SchedulerPolicy synchronous() { return {Kind::synchronous, {}}; }
  static SchedulerPolicy interleaving() { return {Kind::interleaving, {}}; }
  static SchedulerPolicy random_subset() { return {Kind::random_subset, {}}; }
  static SchedulerPolicy scripted(std::vector<ScriptEntry> entries) { return {Kind::script, std::move(entries)}; }

  std::string name() const;
  static SchedulerPolicy parse(const std::string& name);
};

struct EngineConfig {
  SchedulerPolicy policy;
  std::uint64_t seed = 0;
  InconsistencyPolicy on_inconsistency = InconsistencyPolicy::halt;
  std::size_t max_read_lag = 0;
};

struct RunState {
  State state;
  AgentRegistry registry;
  std::size_t step_index = 0;
  RunStatus status = RunStatus::running;
  std::string halt_reason;
  std::vector<Location> clashes;
};

struct Observation {
  std::size_t step = 0;
  Location loc;
  Value value;
};

/// Initial run state: a0 running main with its inputs, or the agents of a
/// static system. Throws SpecError for inputs that are not main's inputs.
RunState init_run(const Program& program, const std::map<std::string, Value>& inputs);

bool active(AgentId a, const RunState& run);
bool waiting(AgentId a, const RunState& run);

std::string program_hash(const Program& program);

/// Sequential, deterministic executor of recursive (and concurrent) runs.
class Engine {
 public:
  Engine(Program program, EngineConfig config, const std::map<std::string, Value>& inputs = {});

  const Program& program() const { return program_; }
  const RunState& run() const { return run_; }
  const State& state() const { return run_.state; }
  const AgentRegistry& registry() const { return run_.registry; }
  RunStatus status() const { return run_.status; }
  const Trace& trace() const { return trace_; }
  /// S_0, S_1, ...: the state after every step.
  const std::vector<State>& history() const { return history_; }
  const std::vector<Observation>& observations() const { return observations_; }

  /// Update-set family of an agent's program in the given state.
  UpdateSetFamily family_of(AgentId agent, const State& state) const;
  std::vector<AgentId> candidates() const;

  const StepRecord& step();
  /// Steps until quiescent, halted, or the budget is spent (status stays running).
  RunStatus run_to_quiescence(std::size_t max_steps);

 private:
  std::vector<AgentId> select(const std::vector<AgentId>& cands, const ScriptEntry* entry);
  std::size_t draw(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  Program program_;
  EngineConfig config_;
  std::mt19937_64 rng_;
  RunState run_;
  Trace trace_;
  std::vector<State> history_;
  std::vector<Observation> observations_;
  std::map<std::uint64_t, std::size_t> last_write_;
  StepRecord idle_;
};

/// Replays a trace's selections and choices as a script.
SchedulerPolicy replay_policy(const Trace& trace);

struct Violation {
  std::size_t step = 0;
  std::string kind;
  std::string message;
};

struct AssertionReport {
  std::vector<Violation> violations;
  std::size_t steps_checked = 0;
  bool ok() const { return violations.empty(); }
};

/// Checks the call-step discipline of a recorded run: no waiting or inactive
/// agent steps, writes stay within the agent's own ambient, shared locations,
/// or its output slot, callees are only initialized by their caller, ids are
/// fresh, and no move issues more calls than the static bound.
AssertionReport assert_postulates(const Trace& trace);

json to_json(const AssertionReport& r);

}  // namespace recasm

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recasm/json_io.hpp"
#include "recasm/semantics.hpp"

namespace recasm {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunStatus { running, halted, quiescent };
const char* to_string(RunStatus s);

struct SpawnRecord {
  AgentId id;
  AgentId ambient;
  Spawn spawn;
};

struct AliasRecord {
  AgentId agent;
  std::string symbol;
  Location target;
};

/// One agent's contribution to a step. Reads happened in state S_read_index,
/// the updates were committed to S_write_index giving S_(write_index + 1).
struct Move {
  AgentId agent;
  AgentId ambient;
  std::string rule;
  std::size_t read_index = 0;
  std::size_t write_index = 0;
  std::size_t choice = 0;
  std::size_t family_size = 1;
  UpdateSet updates;
  UpdateSet initialize;  // callee input locations written at commit
  std::vector<AliasRecord> aliases;
  std::vector<SpawnRecord> spawns;
  bool terminates = false;
};

struct StepRecord {
  std::size_t step = 0;  // 1-based; produces S_step
  std::vector<Move> moves;
  UpdateSet combined;
  bool inconsistent = false;
  std::vector<Location> clashes;
  std::vector<AgentId> terminated;
  RunStatus status = RunStatus::running;
};

struct RuleSummary {
  std::vector<std::string> params;
  std::string output;
  bool delegate = false;
  std::size_t calls = 0;
};

struct InitialAgent {
  AgentId id;
  std::string rule;
  std::string name;
};

struct TraceHeader {
  std::string program_hash;
  std::uint64_t seed = 0;
  std::string policy;
  std::string on_inconsistency = "halt";
  std::size_t max_read_lag = 0;
  std::size_t branching_bound = 0;
  std::map<std::string, RuleSummary> rules;
  std::vector<std::string> shared;
  std::vector<InitialAgent> agents;
  State initial_state;
};

struct Trace {
  TraceHeader header;
  std::vector<StepRecord> steps;
};

json to_json(const TraceHeader& h);
json to_json(const StepRecord& s);
json to_json(const Move& m);
TraceHeader header_from_json(const json& j);
StepRecord step_from_json(const json& j);

/// JSON lines: header record, then one record per step.
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_jsonl(const Trace& trace);
/// Throws TraceFormatError on malformed input.
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);

/// Applies a move's committed effect (updates, callee initialization, aliases).
void apply_move(State& state, const Move& m);

}  // namespace recasm

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "recasm/ast.hpp"
#include "recasm/json_io.hpp"
#include "recasm/runtime.hpp"
#include "recasm/trace.hpp"

namespace recasm {

class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the rules of a recursive program as the program base of a concurrent
/// one: every body r becomes IF active() and not waiting() THEN r.
Program wrap_recursive_as_concurrent(const Program& program);

/// Moves of a recorded run with the order m < m' iff m wrote before m' read.
/// Moves of inconsistent steps had no effect and are left out.
struct PoRun {
  std::vector<Move> moves;
  std::vector<std::size_t> steps;  // step number of each move
  State initial;
  std::vector<AgentRegistry> registry_before;  // indexed by write index

  bool precedes(std::size_t a, std::size_t b) const {
    return moves[a].write_index + 1 <= moves[b].read_index;
  }
  std::size_t size() const { return moves.size(); }
};

PoRun extract_po_run(const Trace& trace);

struct PoCheckMode {
  enum class Kind { exhaustive, sampled };
  Kind kind = Kind::exhaustive;
  std::size_t limit = 12;    // exhaustive: largest segment size
  std::size_t samples = 50;  // sampled: number of linear extensions
  std::uint64_t seed = 0;

  static PoCheckMode exhaustive(std::size_t limit = 12) { return {Kind::exhaustive, limit, 0, 0}; }
  static PoCheckMode sampled(std::size_t n, std::uint64_t seed) { return {Kind::sampled, 0, n, seed}; }
  static PoCheckMode parse(const std::string& text);
};

struct PoCounterexample {
  std::string condition;
  std::vector<std::size_t> segment;
  std::optional<std::size_t> move;
  std::string message;
};

struct PoReport {
  bool finite_history = true;
  bool sequentiality = true;
  bool irreflexive = true;
  bool transitive = true;
  bool coherence = true;
  std::size_t segments_checked = 0;
  bool complete = false;
  std::optional<PoCounterexample> counterexample;

  bool pass() const { return finite_history && sequentiality && irreflexive && transitive && coherence; }
};

/// Checks the partial-order run conditions. Coherence: for every initial
/// segment X with maximal move x, x's agent exists in Y = X - {x}, its
/// recorded step is a member of the agent's update-set family in sigma(Y),
/// and sigma(X) does not depend on which maximal move is taken last.
PoReport check_po_run(const Program& program, const PoRun& run, const PoCheckMode& mode);

json to_json(const PoReport& r);

/// Covering pairs of the order.
std::vector<std::pair<std::size_t, std::size_t>> covering_edges(const PoRun& run);
std::string export_dot(const PoRun& run);
json export_json(const PoRun& run);

/// Simulates a concurrent program by a recursive one with delegates. Each
/// rule N gets a caller N__caller that snapshots the closed read terms of N
/// into a list and calls the delegate N__step, which runs N's body on the
/// snapshot in its caller's ambient and terminates. Static systems get a boot
/// main that starts one caller per agent, in declaration order.
Program delegate_transform(const Program& program);

/// Script that replays a concurrent run on the delegate program: the selected
/// callers step, then all delegates step with the concurrent choices.
SchedulerPolicy eager_alternating_schedule(const Trace& concurrent, const Program& source);

/// Index of the recursive state matching concurrent state S_k.
inline std::size_t delegate_state_index(const Program& source, std::size_t k) {
  return 2 * k + (source.is_static() ? 1 : 0);
}

/// Keeps only locations and aliases of the given symbols.
State restrict_state(const State& state, const std::set<std::string>& symbols);
std::set<std::string> signature_symbols(const Program& program);

/// Static system without calls over shared symbols, as one rule choosing a
/// non-empty subset of the agents and firing their rules in parallel.
Program flatten_static(const Program& program);

struct RunSet {
  std::set<std::vector<std::string>> runs;  // canonical state sequences
  bool truncated = false;
};

/// All state sequences of at most `depth` steps. A program runs main as a
/// single agent; a static system fires every non-empty subset of its agents.
/// A step whose combined update set is inconsistent ends the branch.
RunSet enumerate_runs(const Program& program, const std::map<std::string, Value>& inputs, std::size_t depth,
                      std::size_t max_runs = 1000000);

json to_json(const RunSet& r);

}  // namespace recasm

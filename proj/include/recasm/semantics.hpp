#pragma once

#include <map>
#include <string>
#include <vector>

#include "recasm/ast.hpp"
#include "recasm/registry.hpp"
#include "recasm/state.hpp"

namespace recasm {

/// Variables bound by LET and FORALL, the ambient whose locations unqualified
/// symbols denote, and the agent executing the rule (differs from the ambient
/// only for delegates).
struct Environment {
  std::map<std::string, Value> vars;
  AgentId ambient;
  AgentId self;

  static Environment of(AgentId a) { return Environment{{}, a, a}; }
};

/// A call issued in a step: the callee instance to create, its inputs, and the
/// canonical caller location its output slot aliases.
struct Spawn {
  std::string rule;
  std::vector<Value> inputs;
  Location output;
  AgentId caller;
  bool delegate = false;

  auto operator<=>(const Spawn&) const = default;
  bool operator==(const Spawn&) const = default;
};

/// The effect of one agent step: updates plus the registry delta of its calls
/// and whether it assigned `terminated`.
struct StepUpdate {
  UpdateSet updates;
  std::vector<Spawn> spawns;  // kept sorted
  bool terminate = false;

  auto operator<=>(const StepUpdate&) const = default;
  bool operator==(const StepUpdate&) const = default;
};

/// Sorted, duplicate-free, never empty.
using UpdateSetFamily = std::vector<StepUpdate>;

struct EvalContext {
  const State& state;
  const Program* program = nullptr;
  const AgentRegistry* registry = nullptr;
};

/// Location denoted by symbol `name` applied to `args` in `ambient`, resolved
/// through the alias table.
Location locate(const State& state, AgentId ambient, const std::string& name, std::vector<Value> args);

Value eval_term(const EvalContext& ctx, const Environment& env, const Term& term);
Value eval_term(const State& state, AgentId ambient, const Term& term);

/// Background interpretation of a built-in operation on evaluated arguments.
/// Ill-typed applications, overflow and division by zero give undef.
Value apply_background(const std::string& op, const std::vector<Value>& args);

UpdateSetFamily delta(const Rule& rule, const EvalContext& ctx, const Environment& env);

/// Update set and registry delta of a call rule: no updates, one spawn.
StepUpdate call_updates(const Rule& call, const EvalContext& ctx, const Environment& env);

/// Values of index arguments at which unary symbol f is defined in the ambient.
std::vector<Value> relevant_indices(const State& state, AgentId ambient, const std::string& f);

/// Subterm-closed read terms of a rule, LET variables replaced by their
/// definitions. FORALL variables stay free; relevant_indices(f) domains appear
/// as the marker term relevant_indices('f).
TermSet read_terms_of(const Rule& rule);

/// True iff the two states coinciding on the read terms of `rule` implies
/// equal update-set families.
bool witness_check(const Rule& rule, const State& s1, const State& s2, const Environment& env,
                   const Program* program = nullptr, const AgentRegistry* registry = nullptr);
/// Whether two states coincide on the read terms of `rule`.
bool coincide_on_witness(const Rule& rule, const State& s1, const State& s2, const Environment& env,
                         const Program* program = nullptr);

Spawn apply_isomorphism(const Isomorphism& iso, const Spawn& s);
UpdateSetFamily apply_isomorphism(const Isomorphism& iso, const UpdateSetFamily& family);

}  // namespace recasm

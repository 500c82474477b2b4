#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recasm/state.hpp"

namespace recasm {

struct Span {
  int line = 0;
  int col = 0;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Constant, variable (bound by LET or FORALL) or application of a signature
/// symbol or background operation.
struct Term {
  enum class Kind { constant, variable, apply };

  Kind kind = Kind::constant;
  Value value;                // constant
  std::string name;           // variable name or applied symbol
  std::vector<TermPtr> args;  // apply
  Span span;

  static TermPtr constant(Value v, Span s = {});
  static TermPtr variable(std::string name, Span s = {});
  static TermPtr apply(std::string name, std::vector<TermPtr> args, Span s = {});
};

/// Structural order on terms; spans are ignored.
int compare_terms(const Term& a, const Term& b);
bool terms_equal(const TermPtr& a, const TermPtr& b);

struct TermLess {
  bool operator()(const TermPtr& a, const TermPtr& b) const { return compare_terms(*a, *b) < 0; }
};
using TermSet = std::set<TermPtr, TermLess>;

/// Built-in operations interpreted by the background, never signature members.
bool is_background_op(const std::string& name);
/// Fixed arity of a background operation, -1 for the variadic list constructor.
int background_arity(const std::string& name);
/// Registry predicates, only meaningful in concurrent programs.
bool is_registry_predicate(const std::string& name);

struct Rule;
using RulePtr = std::shared_ptr<const Rule>;

struct ForallDomain {
  enum class Kind { term, range, relevant_indices };
  Kind kind = Kind::term;
  TermPtr lo;          // term: the list; range: lower bound
  TermPtr hi;          // range: exclusive upper bound
  std::string symbol;  // relevant_indices
};

struct Rule {
  enum class Kind { assign, cond, par, choose, let, call, forall };

  Kind kind = Kind::par;
  TermPtr target;  // assign target, call output term
  TermPtr term;    // assign value, if condition, let definition
  std::string name;  // let/forall variable, called rule
  std::vector<TermPtr> args;      // call arguments
  std::vector<RulePtr> children;  // par/choose members, if/let/forall body
  ForallDomain domain;
  Span span;

  static RulePtr skip(Span s = {});
  static RulePtr assign(TermPtr target, TermPtr value, Span s = {});
  static RulePtr cond(TermPtr c, RulePtr then, Span s = {});
  static RulePtr par(std::vector<RulePtr> rules, Span s = {});
  static RulePtr choose(std::vector<RulePtr> rules, Span s = {});
  static RulePtr let(std::string var, TermPtr def, RulePtr body, Span s = {});
  static RulePtr call(TermPtr out, std::string rule, std::vector<TermPtr> args, Span s = {});
  static RulePtr forall(std::string var, ForallDomain domain, RulePtr body, Span s = {});
};

bool rules_equal(const RulePtr& a, const RulePtr& b);

/// Number of call sites in a rule body.
std::size_t count_calls(const Rule& rule);

struct RuleDecl {
  std::string name;
  std::vector<std::string> params;
  std::string output;  // empty when the rule has no output slot
  RulePtr body;
  bool is_main = false;
  bool is_delegate = false;
  Span span;
};

struct AgentDecl {
  std::string name;
  std::string rule;
};

/// A recursive ASM: named rules, one of them main. With `concurrent` set it is
/// read as a concurrent ASM whose program base is the rule set; a non-empty
/// agent list makes it a static system instead of one started from main.
struct Program {
  std::vector<RuleDecl> rules;
  std::string main;
  bool concurrent = false;
  std::vector<std::string> shared;  // declared shared symbols, in order
  std::map<std::string, std::size_t> shared_arity;
  std::vector<std::string> observe;
  std::vector<AgentDecl> agents;
  std::shared_ptr<const Signature> signature;

  const RuleDecl* find_rule(const std::string& name) const;
  const RuleDecl& rule(const std::string& name) const;
  bool is_static() const { return !agents.empty(); }
  /// Largest number of call sites in any rule body (branching bound m).
  std::size_t branching_bound() const;
};

bool programs_equal(const Program& a, const Program& b);

}  // namespace recasm

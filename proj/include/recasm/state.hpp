#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "recasm/value.hpp"

namespace recasm {

/// Raised for statically detectable specification errors (unbound variables,
/// arity mismatches, malformed isomorphisms, bad configuration).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SymbolKind { input, local, output };

const char* to_string(SymbolKind kind);

struct SymbolInfo {
  std::string name;
  std::size_t arity = 0;
  SymbolKind kind = SymbolKind::local;
  // Shared symbols are not parameterized by an ambient: every agent sees the
  // same locations.
  bool shared = false;

  bool operator==(const SymbolInfo&) const = default;
};

/// Finite set of function symbols, partitioned into input, local and output.
/// Background operations are never members.
class Signature {
 public:
  /// Adds or re-checks a symbol. Throws SpecError on a conflicting redeclaration.
  void declare(const SymbolInfo& info);
  const SymbolInfo* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  const std::map<std::string, SymbolInfo>& symbols() const { return symbols_; }

  bool operator==(const Signature&) const = default;

 private:
  std::map<std::string, SymbolInfo> symbols_;
};

struct Location {
  std::optional<AgentId> ambient;
  std::string symbol;
  std::vector<Value> args;

  auto operator<=>(const Location&) const = default;
  bool operator==(const Location&) const = default;

  std::string to_string() const;
};

struct Update {
  Location loc;
  Value value;

  auto operator<=>(const Update&) const = default;
  bool operator==(const Update&) const = default;
};

/// Finite set of updates. May be inconsistent; consistency is a predicate.
class UpdateSet {
 public:
  UpdateSet() = default;
  UpdateSet(std::initializer_list<Update> updates) : updates_(updates) {}

  void insert(Update u) { updates_.insert(std::move(u)); }
  void merge(const UpdateSet& other) { updates_.insert(other.updates_.begin(), other.updates_.end()); }
  bool empty() const { return updates_.empty(); }
  std::size_t size() const { return updates_.size(); }
  auto begin() const { return updates_.begin(); }
  auto end() const { return updates_.end(); }
  bool contains(const Update& u) const { return updates_.count(u) > 0; }
  void erase(const Update& u) { updates_.erase(u); }

  bool consistent() const;
  /// Locations that receive two different values.
  std::vector<Location> clashes() const;

  auto operator<=>(const UpdateSet&) const = default;
  bool operator==(const UpdateSet&) const = default;

 private:
  std::set<Update> updates_;
};

using AliasKey = std::pair<AgentId, std::string>;

/// A structure over a signature, stored sparsely: absent locations read undef.
/// Alias entries make a callee's output slot resolve to the caller's location.
class State {
 public:
  State() : signature_(std::make_shared<const Signature>()) {}
  explicit State(std::shared_ptr<const Signature> signature) : signature_(std::move(signature)) {}

  const Signature& signature() const { return *signature_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return signature_; }

  /// Canonical location after following the alias table. Idempotent.
  Location resolve(const Location& loc) const;
  Value lookup(const Location& loc) const;

  /// Writes a canonical location directly; writing undef removes the entry.
  void assign(const Location& loc, const Value& value);
  /// Records that (agent, symbol) reads and writes through `target`, which is
  /// resolved first so chains collapse.
  void add_alias(AgentId agent, const std::string& symbol, const Location& target);

  const std::map<Location, Value>& store() const { return store_; }
  const std::map<AliasKey, Location>& aliases() const { return aliases_; }

  /// Values are compared on store and alias table; the signature is metadata.
  bool operator==(const State& other) const {
    return store_ == other.store_ && aliases_ == other.aliases_;
  }

 private:
  std::shared_ptr<const Signature> signature_;
  std::map<Location, Value> store_;
  std::map<AliasKey, Location> aliases_;
};

enum class InconsistencyPolicy { halt, skip };

struct InconsistencyReport {
  std::vector<Location> clashes;
};

using ApplyResult = std::variant<State, InconsistencyReport>;

/// S + delta. Under `skip` an inconsistent set leaves the state unchanged.
ApplyResult apply_updates(const State& state, const UpdateSet& delta,
                          InconsistencyPolicy policy = InconsistencyPolicy::halt);

/// Unique minimal consistent update set turning s1 into s2 (stores only).
UpdateSet diff_states(const State& s1, const State& s2);

bool is_trivial(const State& state, const Update& u);

/// Permutation of the uninterpreted part of the base set (agent ids and
/// symbol constants). Everything else is fixed.
class Isomorphism {
 public:
  Isomorphism() = default;
  /// Throws SpecError unless `mapping` permutes its own support and maps
  /// agents to agents and symbols to symbols.
  explicit Isomorphism(std::map<Value, Value> mapping);

  static Isomorphism swap(const Value& a, const Value& b);

  Value apply(const Value& v) const;
  AgentId apply(AgentId a) const;
  Location apply(const Location& loc) const;
  UpdateSet apply(const UpdateSet& updates) const;
  Isomorphism inverse() const;

  const std::map<Value, Value>& mapping() const { return mapping_; }

 private:
  std::map<Value, Value> mapping_;
};

State apply_isomorphism(const Isomorphism& iso, const State& state);

}  // namespace recasm

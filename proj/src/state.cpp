#include "recasm/state.hpp"

#include <sstream>

namespace recasm {

const char* to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::input:
      return "input";
    case SymbolKind::local:
      return "local";
    case SymbolKind::output:
      return "output";
  }
  return "?";
}

void Signature::declare(const SymbolInfo& info) {
  auto it = symbols_.find(info.name);
  if (it == symbols_.end()) {
    symbols_.emplace(info.name, info);
    return;
  }
  const SymbolInfo& old = it->second;
  if (old.arity != info.arity) {
    throw SpecError("symbol '" + info.name + "' used with arity " + std::to_string(info.arity) +
                    " and " + std::to_string(old.arity));
  }
  if (old.kind != info.kind) {
    throw SpecError("symbol '" + info.name + "' is both " + to_string(old.kind) + " and " +
                    to_string(info.kind));
  }
  if (old.shared != info.shared) {
    throw SpecError("symbol '" + info.name + "' is declared shared inconsistently");
  }
}

const SymbolInfo* Signature::find(const std::string& name) const {
  auto it = symbols_.find(name);
  return it == symbols_.end() ? nullptr : &it->second;
}

std::string Location::to_string() const {
  std::ostringstream out;
  if (ambient) out << '@' << ambient->id << '.';
  out << symbol;
  if (!args.empty()) {
    out << '(';
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) out << ", ";
      out << args[i].to_string();
    }
    out << ')';
  }
  return out.str();
}

bool UpdateSet::consistent() const {
  // Updates are sorted by location first, so clashes are adjacent.
  const Update* prev = nullptr;
  for (const auto& u : updates_) {
    if (prev && prev->loc == u.loc) return false;
    prev = &u;
  }
  return true;
}

std::vector<Location> UpdateSet::clashes() const {
  std::vector<Location> out;
  const Update* prev = nullptr;
  for (const auto& u : updates_) {
    if (prev && prev->loc == u.loc && (out.empty() || out.back() != u.loc)) out.push_back(u.loc);
    prev = &u;
  }
  return out;
}

Location State::resolve(const Location& loc) const {
  if (!loc.ambient || !loc.args.empty()) return loc;
  auto it = aliases_.find({*loc.ambient, loc.symbol});
  if (it == aliases_.end()) return loc;
  return it->second;
}

Value State::lookup(const Location& loc) const {
  auto it = store_.find(resolve(loc));
  return it == store_.end() ? kUndef : it->second;
}

void State::assign(const Location& loc, const Value& value) {
  if (value.is_undef()) {
    store_.erase(loc);
  } else {
    store_[loc] = value;
  }
}

void State::add_alias(AgentId agent, const std::string& symbol, const Location& target) {
  aliases_[{agent, symbol}] = resolve(target);
}

ApplyResult apply_updates(const State& state, const UpdateSet& delta, InconsistencyPolicy policy) {
  if (!delta.consistent()) {
    if (policy == InconsistencyPolicy::skip) return state;
    return InconsistencyReport{delta.clashes()};
  }
  State next = state;
  for (const auto& u : delta) next.assign(u.loc, u.value);
  return next;
}

UpdateSet diff_states(const State& s1, const State& s2) {
  UpdateSet out;
  for (const auto& [loc, v] : s2.store()) {
    auto it = s1.store().find(loc);
    if (it == s1.store().end() || it->second != v) out.insert({loc, v});
  }
  for (const auto& [loc, v] : s1.store()) {
    if (!s2.store().count(loc)) out.insert({loc, kUndef});
  }
  return out;
}

bool is_trivial(const State& state, const Update& u) {
  auto it = state.store().find(u.loc);
  if (it == state.store().end()) return u.value.is_undef();
  return it->second == u.value;
}

Isomorphism::Isomorphism(std::map<Value, Value> mapping) {
  std::set<Value> keys, values;
  for (const auto& [k, v] : mapping) {
    if (!(k.is_agent() || k.is_symbol())) {
      throw SpecError("invalid isomorphism: " + k.to_string() + " is interpreted by the background");
    }
    if (k.kind() != v.kind()) {
      throw SpecError("invalid isomorphism: " + k.to_string() + " and " + v.to_string() +
                      " are of different sorts");
    }
    keys.insert(k);
    values.insert(v);
  }
  if (keys != values) throw SpecError("invalid isomorphism: mapping is not a permutation of its support");
  for (auto& [k, v] : mapping) {
    if (k != v) mapping_.emplace(k, v);
  }
}

Isomorphism Isomorphism::swap(const Value& a, const Value& b) {
  if (a == b) return Isomorphism{};
  return Isomorphism(std::map<Value, Value>{{a, b}, {b, a}});
}

Value Isomorphism::apply(const Value& v) const {
  if (mapping_.empty()) return v;
  switch (v.kind()) {
    case Value::Kind::agent:
    case Value::Kind::symbol: {
      auto it = mapping_.find(v);
      return it == mapping_.end() ? v : it->second;
    }
    case Value::Kind::list: {
      Value::List items;
      items.reserve(v.as_list().size());
      for (const auto& x : v.as_list()) items.push_back(apply(x));
      return Value(std::move(items));
    }
    default:
      return v;
  }
}

AgentId Isomorphism::apply(AgentId a) const { return apply(Value(a)).as_agent(); }

Location Isomorphism::apply(const Location& loc) const {
  Location out{loc.ambient, loc.symbol, {}};
  if (out.ambient) out.ambient = apply(*out.ambient);
  out.args.reserve(loc.args.size());
  for (const auto& a : loc.args) out.args.push_back(apply(a));
  return out;
}

UpdateSet Isomorphism::apply(const UpdateSet& updates) const {
  UpdateSet out;
  for (const auto& u : updates) out.insert({apply(u.loc), apply(u.value)});
  return out;
}

Isomorphism Isomorphism::inverse() const {
  std::map<Value, Value> inv;
  for (const auto& [k, v] : mapping_) inv.emplace(v, k);
  Isomorphism out;
  out.mapping_ = std::move(inv);
  return out;
}

State apply_isomorphism(const Isomorphism& iso, const State& state) {
  State out(state.signature_ptr());
  for (const auto& [loc, v] : state.store()) out.assign(iso.apply(loc), iso.apply(v));
  for (const auto& [key, target] : state.aliases()) {
    out.add_alias(iso.apply(key.first), key.second, iso.apply(target));
  }
  return out;
}

}  // namespace recasm

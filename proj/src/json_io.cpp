#include "recasm/json_io.hpp"

namespace recasm {

json to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::undef:
      return nullptr;
    case Value::Kind::boolean:
      return v.as_bool();
    case Value::Kind::integer:
      return v.as_int();
    case Value::Kind::list: {
      json arr = json::array();
      for (const auto& x : v.as_list()) arr.push_back(to_json(x));
      return arr;
    }
    case Value::Kind::symbol:
      return json{{"sym", v.as_symbol().name}};
    case Value::Kind::agent:
      return json{{"agent", v.as_agent().id}};
  }
  return nullptr;
}

Value value_from_json(const json& j) {
  if (j.is_null()) return kUndef;
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value::symbol(j.get<std::string>());
  if (j.is_array()) {
    Value::List items;
    for (const auto& x : j) items.push_back(value_from_json(x));
    return Value(std::move(items));
  }
  if (j.is_object() && j.size() == 1) {
    if (j.contains("sym")) return Value::symbol(j.at("sym").get<std::string>());
    if (j.contains("agent")) return Value::agent(j.at("agent").get<std::uint64_t>());
  }
  throw SpecError("cannot read a value from JSON: " + j.dump());
}

json to_json(const Location& loc) {
  json args = json::array();
  for (const auto& a : loc.args) args.push_back(to_json(a));
  return json{{"ambient", loc.ambient ? json(loc.ambient->id) : json(nullptr)},
              {"symbol", loc.symbol},
              {"args", std::move(args)}};
}

Location location_from_json(const json& j) {
  Location loc;
  if (!j.at("ambient").is_null()) loc.ambient = AgentId{j.at("ambient").get<std::uint64_t>()};
  loc.symbol = j.at("symbol").get<std::string>();
  for (const auto& a : j.at("args")) loc.args.push_back(value_from_json(a));
  return loc;
}

json to_json(const UpdateSet& updates) {
  json arr = json::array();
  for (const auto& u : updates) arr.push_back(json{{"loc", to_json(u.loc)}, {"value", to_json(u.value)}});
  return arr;
}

UpdateSet update_set_from_json(const json& j) {
  UpdateSet out;
  for (const auto& u : j) out.insert({location_from_json(u.at("loc")), value_from_json(u.at("value"))});
  return out;
}

json to_json(const State& state) {
  json store = json::array();
  for (const auto& [loc, v] : state.store()) store.push_back(json{{"loc", to_json(loc)}, {"value", to_json(v)}});
  json aliases = json::array();
  for (const auto& [key, target] : state.aliases()) {
    aliases.push_back(json{{"agent", key.first.id}, {"symbol", key.second}, {"target", to_json(target)}});
  }
  return json{{"store", std::move(store)}, {"aliases", std::move(aliases)}};
}

State state_from_json(const json& j, std::shared_ptr<const Signature> signature) {
  State s = signature ? State(std::move(signature)) : State();
  for (const auto& e : j.at("store")) s.assign(location_from_json(e.at("loc")), value_from_json(e.at("value")));
  if (j.contains("aliases")) {
    for (const auto& a : j.at("aliases")) {
      s.add_alias(AgentId{a.at("agent").get<std::uint64_t>()}, a.at("symbol").get<std::string>(),
                  location_from_json(a.at("target")));
    }
  }
  return s;
}

std::string canonical(const State& state) { return to_json(state).dump(); }

}  // namespace recasm

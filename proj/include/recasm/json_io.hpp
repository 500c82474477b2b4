#pragma once

#include <string>

#include <json.hpp>

#include "recasm/state.hpp"

namespace recasm {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Values: undef is null, symbols are {"sym": name}, agents are {"agent": id}.
json to_json(const Value& v);
Value value_from_json(const json& j);

json to_json(const Location& loc);
Location location_from_json(const json& j);

json to_json(const UpdateSet& updates);
UpdateSet update_set_from_json(const json& j);

/// Store and alias table in location order. Byte-stable under dump().
json to_json(const State& state);
State state_from_json(const json& j, std::shared_ptr<const Signature> signature = nullptr);

std::string canonical(const State& state);

}  // namespace recasm

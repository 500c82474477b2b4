#include "recasm/registry.hpp"

#include <stdexcept>

namespace recasm {

AgentId AgentRegistry::mint(bool delegate) {
  std::uint64_t& counter = delegate ? next_delegate_ : next_;
  while (agents_.count(counter)) ++counter;
  return AgentId{counter++};
}

void AgentRegistry::add(AgentInfo info) {
  if (agents_.count(info.id.id)) throw std::logic_error("agent id reused: " + std::to_string(info.id.id));
  std::uint64_t& counter = info.id.id >= kDelegateIdBase ? next_delegate_ : next_;
  if (info.id.id >= counter) counter = info.id.id + 1;
  if (info.caller && agents_.count(info.caller->id)) agents_.at(info.caller->id).children.push_back(info.id);
  agents_.emplace(info.id.id, std::move(info));
}

const AgentInfo& AgentRegistry::info(AgentId a) const {
  auto it = agents_.find(a.id);
  if (it == agents_.end()) throw std::logic_error("unknown agent @" + std::to_string(a.id));
  return it->second;
}

AgentInfo& AgentRegistry::info(AgentId a) {
  auto it = agents_.find(a.id);
  if (it == agents_.end()) throw std::logic_error("unknown agent @" + std::to_string(a.id));
  return it->second;
}

bool AgentRegistry::active(AgentId a) const { return !info(a).terminated; }

bool AgentRegistry::waiting(AgentId a) const {
  for (AgentId c : info(a).children) {
    if (active(c)) return true;
  }
  return false;
}

bool AgentRegistry::waiting_for_callees(AgentId a) const {
  for (AgentId c : info(a).children) {
    if (!info(c).delegate && active(c)) return true;
  }
  return false;
}

bool AgentRegistry::has_active_descendant(AgentId a) const {
  for (AgentId c : info(a).children) {
    if (active(c) || has_active_descendant(c)) return true;
  }
  return false;
}

std::vector<AgentId> AgentRegistry::agents() const {
  std::vector<AgentId> out;
  for (const auto& [id, _] : agents_) out.push_back(AgentId{id});
  return out;
}

std::vector<AgentId> AgentRegistry::active_agents() const {
  std::vector<AgentId> out;
  for (const auto& [id, a] : agents_) {
    if (!a.terminated) out.push_back(AgentId{id});
  }
  return out;
}

bool AgentRegistry::operator==(const AgentRegistry& other) const {
  if (agents_.size() != other.agents_.size()) return false;
  for (const auto& [id, a] : agents_) {
    auto it = other.agents_.find(id);
    if (it == other.agents_.end()) return false;
    const AgentInfo& b = it->second;
    if (a.rule != b.rule || a.ambient != b.ambient || a.caller != b.caller || a.children != b.children ||
        a.terminated != b.terminated || a.delegate != b.delegate) {
      return false;
    }
  }
  return true;
}

}  // namespace recasm

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recasm/value.hpp"

namespace recasm {

// Delegates draw ids from a separate range so the ids of ordinary agents match
// between a concurrent run and its delegate simulation.
inline constexpr std::uint64_t kDelegateIdBase = std::uint64_t{1} << 40;

struct AgentInfo {
  AgentId id;
  std::string rule;
  AgentId ambient;
  std::optional<AgentId> caller;
  std::vector<AgentId> children;
  bool terminated = false;
  bool delegate = false;
  std::size_t created_step = 0;
  std::string name;  // static agents only
};

/// Agents, their programs and the call forest. Terminated agents stay
/// registered; Waiting only looks at children that are still active.
class AgentRegistry {
 public:
  AgentId mint(bool delegate);
  /// Registers an agent with an id obtained from mint() or chosen up front.
  void add(AgentInfo info);

  bool contains(AgentId a) const { return agents_.count(a.id) > 0; }
  const AgentInfo& info(AgentId a) const;
  AgentInfo& info(AgentId a);

  bool active(AgentId a) const;
  bool waiting(AgentId a) const;
  /// Waiting that ignores delegate children; this is what programs observe.
  bool waiting_for_callees(AgentId a) const;
  bool has_active_descendant(AgentId a) const;
  void terminate(AgentId a) { info(a).terminated = true; }

  std::vector<AgentId> agents() const;
  std::vector<AgentId> active_agents() const;
  const std::map<std::uint64_t, AgentInfo>& all() const { return agents_; }

  bool operator==(const AgentRegistry& other) const;

 private:
  std::map<std::uint64_t, AgentInfo> agents_;
  std::uint64_t next_ = 0;
  std::uint64_t next_delegate_ = kDelegateIdBase;
};

}  // namespace recasm

#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace recasm {

/// Opaque agent identity. Only the engine mints these.
struct AgentId {
  std::uint64_t id = 0;
  auto operator<=>(const AgentId&) const = default;
};

/// Uninterpreted constant of the base set, written 'name in programs.
struct Symbol {
  std::string name;
  auto operator<=>(const Symbol&) const = default;
};

struct Undef {
  auto operator<=>(const Undef&) const = default;
};

/// Element of the base set. Lists share their storage and are never mutated
/// after construction, so copying a Value is cheap.
class Value {
 public:
  using List = std::vector<Value>;

  enum class Kind : std::uint8_t { undef, boolean, integer, list, symbol, agent };

  Value() = default;
  Value(Undef) {}
  Value(bool b) : data_(b) {}
  Value(std::int64_t i) : data_(i) {}
  Value(int i) : data_(static_cast<std::int64_t>(i)) {}
  Value(List items) : data_(std::make_shared<const List>(std::move(items))) {}
  Value(Symbol s) : data_(std::move(s)) {}
  Value(const char*) = delete;
  Value(AgentId a) : data_(a) {}

  static Value list(List items) { return Value(std::move(items)); }
  static Value symbol(std::string name) { return Value(Symbol{std::move(name)}); }
  static Value agent(std::uint64_t id) { return Value(AgentId{id}); }

  Kind kind() const { return static_cast<Kind>(data_.index()); }
  bool is_undef() const { return kind() == Kind::undef; }
  bool is_bool() const { return kind() == Kind::boolean; }
  bool is_int() const { return kind() == Kind::integer; }
  bool is_list() const { return kind() == Kind::list; }
  bool is_symbol() const { return kind() == Kind::symbol; }
  bool is_agent() const { return kind() == Kind::agent; }
  bool is_true() const { return is_bool() && std::get<bool>(data_); }

  bool as_bool() const { return std::get<bool>(data_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  const List& as_list() const { return *std::get<std::shared_ptr<const List>>(data_); }
  const Symbol& as_symbol() const { return std::get<Symbol>(data_); }
  AgentId as_agent() const { return std::get<AgentId>(data_); }

  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    int c = compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Human-readable rendering that the DSL lexer reads back for literals.
  std::string to_string() const;

 private:
  static int compare(const Value& a, const Value& b);

  std::variant<Undef, bool, std::int64_t, std::shared_ptr<const List>, Symbol, AgentId> data_;
};

inline const Value kUndef{};

}  // namespace recasm

#include "recasm/value.hpp"

#include <sstream>

namespace recasm {

int Value::compare(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) {
    return a.data_.index() < b.data_.index() ? -1 : 1;
  }
  switch (a.kind()) {
    case Kind::undef:
      return 0;
    case Kind::boolean:
      return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
    case Kind::integer:
      return a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
    case Kind::list: {
      const auto& la = std::get<std::shared_ptr<const List>>(a.data_);
      const auto& lb = std::get<std::shared_ptr<const List>>(b.data_);
      if (la == lb) return 0;
      size_t n = std::min(la->size(), lb->size());
      for (size_t i = 0; i < n; ++i) {
        int c = compare((*la)[i], (*lb)[i]);
        if (c != 0) return c;
      }
      return la->size() < lb->size() ? -1 : (la->size() > lb->size() ? 1 : 0);
    }
    case Kind::symbol:
      return a.as_symbol().name.compare(b.as_symbol().name) < 0
                 ? -1
                 : (a.as_symbol().name == b.as_symbol().name ? 0 : 1);
    case Kind::agent:
      return a.as_agent().id < b.as_agent().id ? -1 : (a.as_agent().id > b.as_agent().id ? 1 : 0);
  }
  return 0;
}

std::string Value::to_string() const {
  switch (kind()) {
    case Kind::undef:
      return "undef";
    case Kind::boolean:
      return as_bool() ? "true" : "false";
    case Kind::integer:
      return std::to_string(as_int());
    case Kind::list: {
      std::ostringstream out;
      out << '[';
      const auto& items = as_list();
      for (size_t i = 0; i < items.size(); ++i) {
        if (i) out << ", ";
        out << items[i].to_string();
      }
      out << ']';
      return out.str();
    }
    case Kind::symbol:
      return "'" + as_symbol().name;
    case Kind::agent:
      return "@" + std::to_string(as_agent().id);
  }
  return "?";
}

}  // namespace recasm

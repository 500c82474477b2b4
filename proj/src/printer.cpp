#include "recasm/printer.hpp"

#include <sstream>

namespace recasm {

namespace {

bool is_infix(const std::string& op) {
  static const char* ops[] = {"and", "or", "=", "!=", "<", "<=", ">", ">=", "+", "-", "*", "div", "mod"};
  for (const char* o : ops) {
    if (op == o) return true;
  }
  return false;
}

std::string pad(int n) { return std::string(static_cast<size_t>(n) * 2, ' '); }

}  // namespace

std::string print_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::constant:
      return t.value.to_string();
    case Term::Kind::variable:
      return t.name;
    case Term::Kind::apply:
      break;
  }
  if (t.args.size() == 2 && is_infix(t.name)) {
    return "(" + print_term(*t.args[0]) + " " + t.name + " " + print_term(*t.args[1]) + ")";
  }
  if (t.name == "not" && t.args.size() == 1) return "(not " + print_term(*t.args[0]) + ")";
  if (t.name == "neg" && t.args.size() == 1) return "(-" + print_term(*t.args[0]) + ")";
  std::string out;
  if (t.name == "list") {
    out = "[";
  } else {
    out = t.name;
    if (t.args.empty() && !is_background_op(t.name)) return out;
    out += "(";
  }
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += print_term(*t.args[i]);
  }
  out += t.name == "list" ? "]" : ")";
  return out;
}

std::string print_rule(const Rule& r, int indent) {
  std::ostringstream out;
  switch (r.kind) {
    case Rule::Kind::assign:
      out << pad(indent) << print_term(*r.target) << " := " << print_term(*r.term);
      break;
    case Rule::Kind::cond:
      out << pad(indent) << "IF " << print_term(*r.term) << " THEN\n" << print_rule(*r.children[0], indent + 1);
      break;
    case Rule::Kind::par:
    case Rule::Kind::choose: {
      if (r.kind == Rule::Kind::par && r.children.empty()) {
        out << pad(indent) << "skip";
        break;
      }
      const char* sep = r.kind == Rule::Kind::par ? "||" : "|";
      out << pad(indent) << (r.kind == Rule::Kind::par ? "PAR {\n" : "CHOOSE {\n");
      for (size_t i = 0; i < r.children.size(); ++i) {
        if (i) out << pad(indent) << sep << '\n';
        out << print_rule(*r.children[i], indent + 1) << '\n';
      }
      out << pad(indent) << '}';
      break;
    }
    case Rule::Kind::let:
      out << pad(indent) << "LET " << r.name << " = " << print_term(*r.term) << " IN\n"
          << print_rule(*r.children[0], indent + 1);
      break;
    case Rule::Kind::call: {
      out << pad(indent) << "call " << print_term(*r.target) << " <- " << r.name << '(';
      for (size_t i = 0; i < r.args.size(); ++i) {
        if (i) out << ", ";
        out << print_term(*r.args[i]);
      }
      out << ')';
      break;
    }
    case Rule::Kind::forall: {
      out << pad(indent) << "FORALL " << r.name << " IN ";
      const auto& d = r.domain;
      switch (d.kind) {
        case ForallDomain::Kind::term:
          out << print_term(*d.lo);
          break;
        case ForallDomain::Kind::range:
          out << "range(" << print_term(*d.lo) << ", " << print_term(*d.hi) << ')';
          break;
        case ForallDomain::Kind::relevant_indices:
          out << "relevant_indices(" << d.symbol << ')';
          break;
      }
      out << " DO\n" << print_rule(*r.children[0], indent + 1);
      break;
    }
  }
  return out.str();
}

std::string pretty_print(const Program& p) {
  std::ostringstream out;
  bool header = false;
  if (p.concurrent) {
    out << "concurrent;\n";
    header = true;
  }
  for (const auto& s : p.shared) {
    out << "shared " << s << '/' << p.shared_arity.at(s) << ";\n";
    header = true;
  }
  for (const auto& o : p.observe) {
    out << "observe " << o << ";\n";
    header = true;
  }
  for (const auto& a : p.agents) {
    out << "agent " << a.name << " runs " << a.rule << ";\n";
    header = true;
  }
  for (size_t i = 0; i < p.rules.size(); ++i) {
    const auto& r = p.rules[i];
    if (header || i) out << '\n';
    if (r.is_main) out << "main ";
    if (r.is_delegate) out << "delegate ";
    out << "rule " << r.name << '(';
    for (size_t k = 0; k < r.params.size(); ++k) {
      if (k) out << ", ";
      out << r.params[k];
    }
    out << ')';
    if (!r.output.empty()) out << " -> " << r.output;
    out << " {\n" << print_rule(*r.body, 1) << "\n}\n";
  }
  return out.str();
}

}  // namespace recasm

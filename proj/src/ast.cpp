#include "recasm/ast.hpp"

#include <stdexcept>

namespace recasm {

TermPtr Term::constant(Value v, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::constant;
  t->value = std::move(v);
  t->span = s;
  return t;
}

TermPtr Term::variable(std::string name, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::variable;
  t->name = std::move(name);
  t->span = s;
  return t;
}

TermPtr Term::apply(std::string name, std::vector<TermPtr> args, Span s) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::apply;
  t->name = std::move(name);
  t->args = std::move(args);
  t->span = s;
  return t;
}

int compare_terms(const Term& a, const Term& b) {
  if (&a == &b) return 0;
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case Term::Kind::constant:
      return a.value < b.value ? -1 : (a.value == b.value ? 0 : 1);
    case Term::Kind::variable:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case Term::Kind::apply: {
      if (a.name != b.name) return a.name < b.name ? -1 : 1;
      if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
      for (size_t i = 0; i < a.args.size(); ++i) {
        int c = compare_terms(*a.args[i], *b.args[i]);
        if (c) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool terms_equal(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return compare_terms(*a, *b) == 0;
}

namespace {

struct OpArity {
  const char* name;
  int arity;  // -1: variadic
};

constexpr OpArity kBackground[] = {
    {"and", 2},    {"or", 2},        {"not", 1},       {"=", 2},         {"!=", 2},
    {"<", 2},      {"<=", 2},        {">", 2},         {">=", 2},        {"+", 2},
    {"-", 2},      {"*", 2},         {"div", 2},       {"mod", 2},       {"neg", 1},
    {"head", 1},   {"tail", 1},      {"concat", 2},    {"length", 1},    {"list", -1},
    {"append", 2}, {"take", 2},      {"drop", 2},      {"nth", 2},       {"filter_lt", 2},
    {"filter_ge", 2}, {"filter_gt", 2}, {"min_undivided", 2}, {"assoc", 2}, {"active", 0},
    {"waiting", 0},
};

}  // namespace

bool is_background_op(const std::string& name) {
  for (const auto& op : kBackground) {
    if (name == op.name) return true;
  }
  return false;
}

int background_arity(const std::string& name) {
  for (const auto& op : kBackground) {
    if (name == op.name) return op.arity;
  }
  throw std::out_of_range("not a background operation: " + name);
}

bool is_registry_predicate(const std::string& name) { return name == "active" || name == "waiting"; }

namespace {

std::shared_ptr<Rule> make_rule(Rule::Kind kind, Span s) {
  auto r = std::make_shared<Rule>();
  r->kind = kind;
  r->span = s;
  return r;
}

}  // namespace

RulePtr Rule::skip(Span s) { return make_rule(Kind::par, s); }

RulePtr Rule::assign(TermPtr target, TermPtr value, Span s) {
  auto r = make_rule(Kind::assign, s);
  r->target = std::move(target);
  r->term = std::move(value);
  return r;
}

RulePtr Rule::cond(TermPtr c, RulePtr then, Span s) {
  auto r = make_rule(Kind::cond, s);
  r->term = std::move(c);
  r->children = {std::move(then)};
  return r;
}

RulePtr Rule::par(std::vector<RulePtr> rules, Span s) {
  auto r = make_rule(Kind::par, s);
  r->children = std::move(rules);
  return r;
}

RulePtr Rule::choose(std::vector<RulePtr> rules, Span s) {
  auto r = make_rule(Kind::choose, s);
  r->children = std::move(rules);
  return r;
}

RulePtr Rule::let(std::string var, TermPtr def, RulePtr body, Span s) {
  auto r = make_rule(Kind::let, s);
  r->name = std::move(var);
  r->term = std::move(def);
  r->children = {std::move(body)};
  return r;
}

RulePtr Rule::call(TermPtr out, std::string rule, std::vector<TermPtr> args, Span s) {
  auto r = make_rule(Kind::call, s);
  r->target = std::move(out);
  r->name = std::move(rule);
  r->args = std::move(args);
  return r;
}

RulePtr Rule::forall(std::string var, ForallDomain domain, RulePtr body, Span s) {
  auto r = make_rule(Kind::forall, s);
  r->name = std::move(var);
  r->domain = std::move(domain);
  r->children = {std::move(body)};
  return r;
}

bool rules_equal(const RulePtr& a, const RulePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (!terms_equal(a->target, b->target) || !terms_equal(a->term, b->term)) return false;
  if (a->args.size() != b->args.size() || a->children.size() != b->children.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!terms_equal(a->args[i], b->args[i])) return false;
  }
  for (size_t i = 0; i < a->children.size(); ++i) {
    if (!rules_equal(a->children[i], b->children[i])) return false;
  }
  if (a->kind == Rule::Kind::forall) {
    const auto& da = a->domain;
    const auto& db = b->domain;
    if (da.kind != db.kind || da.symbol != db.symbol) return false;
    if (!terms_equal(da.lo, db.lo) || !terms_equal(da.hi, db.hi)) return false;
  }
  return true;
}

std::size_t count_calls(const Rule& rule) {
  std::size_t n = rule.kind == Rule::Kind::call ? 1 : 0;
  for (const auto& c : rule.children) n += count_calls(*c);
  return n;
}

const RuleDecl* Program::find_rule(const std::string& name) const {
  for (const auto& r : rules) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const RuleDecl& Program::rule(const std::string& name) const {
  const RuleDecl* r = find_rule(name);
  if (!r) throw SpecError("undeclared rule '" + name + "'");
  return *r;
}

std::size_t Program::branching_bound() const {
  std::size_t m = 0;
  for (const auto& r : rules) m = std::max(m, count_calls(*r.body));
  return m;
}

bool programs_equal(const Program& a, const Program& b) {
  if (a.main != b.main || a.concurrent != b.concurrent || a.shared != b.shared ||
      a.shared_arity != b.shared_arity || a.observe != b.observe || a.rules.size() != b.rules.size() ||
      a.agents.size() != b.agents.size()) {
    return false;
  }
  for (size_t i = 0; i < a.agents.size(); ++i) {
    if (a.agents[i].name != b.agents[i].name || a.agents[i].rule != b.agents[i].rule) return false;
  }
  for (size_t i = 0; i < a.rules.size(); ++i) {
    const auto& x = a.rules[i];
    const auto& y = b.rules[i];
    if (x.name != y.name || x.params != y.params || x.output != y.output || x.is_main != y.is_main ||
        x.is_delegate != y.is_delegate || !rules_equal(x.body, y.body)) {
      return false;
    }
  }
  return true;
}

}  // namespace recasm

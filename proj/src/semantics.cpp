#include "recasm/semantics.hpp"

#include <algorithm>
#include <functional>

namespace recasm {

Location locate(const State& state, AgentId ambient, const std::string& name, std::vector<Value> args) {
  const SymbolInfo* info = state.signature().find(name);
  Location loc;
  if (!info || !info->shared) loc.ambient = ambient;
  loc.symbol = name;
  loc.args = std::move(args);
  return state.resolve(loc);
}

namespace {

std::optional<std::int64_t> ints(const std::vector<Value>& args, std::int64_t& a, std::int64_t& b) {
  if (args.size() != 2 || !args[0].is_int() || !args[1].is_int()) return std::nullopt;
  a = args[0].as_int();
  b = args[1].as_int();
  return 0;
}

Value floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0 || (a == INT64_MIN && b == -1)) return kUndef;
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return Value(q);
}

Value floor_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) return kUndef;
  if (b == -1) return Value(std::int64_t{0});
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return Value(r);
}

Value filter(const std::vector<Value>& args, const std::function<bool(std::int64_t, std::int64_t)>& keep) {
  if (args.size() != 2 || !args[0].is_list() || !args[1].is_int()) return kUndef;
  Value::List out;
  for (const auto& y : args[0].as_list()) {
    if (!y.is_int()) return kUndef;
    if (keep(y.as_int(), args[1].as_int())) out.push_back(y);
  }
  return Value(std::move(out));
}

}  // namespace

Value apply_background(const std::string& op, const std::vector<Value>& args) {
  std::int64_t a = 0, b = 0, r = 0;
  auto arg = [&](size_t i) -> const Value& { return args.at(i); };

  if (op == "=") return Value(arg(0) == arg(1));
  if (op == "!=") return Value(arg(0) != arg(1));
  if (op == "and" || op == "or") {
    if (!arg(0).is_bool() || !arg(1).is_bool()) return kUndef;
    return Value(op == "and" ? (arg(0).as_bool() && arg(1).as_bool()) : (arg(0).as_bool() || arg(1).as_bool()));
  }
  if (op == "not") return arg(0).is_bool() ? Value(!arg(0).as_bool()) : kUndef;
  if (op == "neg") {
    if (!arg(0).is_int() || arg(0).as_int() == INT64_MIN) return kUndef;
    return Value(-arg(0).as_int());
  }
  if (op == "<" || op == "<=" || op == ">" || op == ">=") {
    if (!ints(args, a, b)) return kUndef;
    if (op == "<") return Value(a < b);
    if (op == "<=") return Value(a <= b);
    if (op == ">") return Value(a > b);
    return Value(a >= b);
  }
  if (op == "+" || op == "-" || op == "*") {
    if (!ints(args, a, b)) return kUndef;
    bool overflow = op == "+"   ? __builtin_add_overflow(a, b, &r)
                    : op == "-" ? __builtin_sub_overflow(a, b, &r)
                                : __builtin_mul_overflow(a, b, &r);
    return overflow ? kUndef : Value(r);
  }
  if (op == "div" || op == "mod") {
    if (!ints(args, a, b)) return kUndef;
    return op == "div" ? floor_div(a, b) : floor_mod(a, b);
  }
  if (op == "list") return Value(Value::List(args.begin(), args.end()));
  if (op == "head" || op == "tail" || op == "length") {
    if (!arg(0).is_list()) return kUndef;
    const auto& l = arg(0).as_list();
    if (op == "length") return Value(static_cast<std::int64_t>(l.size()));
    if (l.empty()) return kUndef;
    if (op == "head") return l.front();
    return Value(Value::List(l.begin() + 1, l.end()));
  }
  if (op == "concat") {
    if (!arg(0).is_list() || !arg(1).is_list()) return kUndef;
    Value::List out = arg(0).as_list();
    out.insert(out.end(), arg(1).as_list().begin(), arg(1).as_list().end());
    return Value(std::move(out));
  }
  if (op == "append") {
    if (!arg(0).is_list()) return kUndef;
    Value::List out = arg(0).as_list();
    out.push_back(arg(1));
    return Value(std::move(out));
  }
  if (op == "take" || op == "drop" || op == "nth") {
    if (!arg(0).is_list() || !arg(1).is_int()) return kUndef;
    const auto& l = arg(0).as_list();
    std::int64_t n = arg(1).as_int();
    if (op == "nth") {
      if (n < 0 || n >= static_cast<std::int64_t>(l.size())) return kUndef;
      return l[static_cast<size_t>(n)];
    }
    size_t k = static_cast<size_t>(std::clamp<std::int64_t>(n, 0, static_cast<std::int64_t>(l.size())));
    if (op == "take") return Value(Value::List(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k)));
    return Value(Value::List(l.begin() + static_cast<std::ptrdiff_t>(k), l.end()));
  }
  if (op == "filter_lt") return filter(args, [](std::int64_t y, std::int64_t x) { return y < x; });
  if (op == "filter_ge") return filter(args, [](std::int64_t y, std::int64_t x) { return y >= x; });
  if (op == "filter_gt") return filter(args, [](std::int64_t y, std::int64_t x) { return y > x; });
  if (op == "min_undivided") {
    if (!arg(0).is_list() || !arg(1).is_int()) return kUndef;
    std::vector<std::int64_t> ds;
    for (const auto& d : arg(0).as_list()) {
      if (!d.is_int() || d.as_int() <= 1) return kUndef;
      ds.push_back(d.as_int());
    }
    // The search is cut off rather than left unbounded; undef past the cap.
    std::int64_t x = arg(1).as_int();
    for (std::int64_t steps = 0; steps < 10'000'000; ++steps, ++x) {
      bool divided = false;
      for (std::int64_t d : ds) {
        if (x % d == 0) {
          divided = true;
          break;
        }
      }
      if (!divided) return Value(x);
    }
    return kUndef;
  }
  if (op == "assoc") {
    if (!arg(0).is_list()) return kUndef;
    for (const auto& pair : arg(0).as_list()) {
      if (pair.is_list() && pair.as_list().size() == 2 && pair.as_list()[0] == arg(1)) return pair.as_list()[1];
    }
    return kUndef;
  }
  return kUndef;
}

Value eval_term(const EvalContext& ctx, const Environment& env, const Term& term) {
  switch (term.kind) {
    case Term::Kind::constant:
      return term.value;
    case Term::Kind::variable: {
      auto it = env.vars.find(term.name);
      if (it == env.vars.end()) throw SpecError("unbound variable '" + term.name + "'");
      return it->second;
    }
    case Term::Kind::apply:
      break;
  }
  if (is_registry_predicate(term.name)) {
    if (!ctx.registry || !ctx.registry->contains(env.ambient)) return kUndef;
    if (term.name == "active") return Value(ctx.registry->active(env.ambient));
    return Value(ctx.registry->waiting_for_callees(env.ambient));
  }
  std::vector<Value> args;
  args.reserve(term.args.size());
  for (const auto& a : term.args) args.push_back(eval_term(ctx, env, *a));
  if (is_background_op(term.name)) {
    int arity = background_arity(term.name);
    if (arity >= 0 && static_cast<size_t>(arity) != args.size()) {
      throw SpecError("'" + term.name + "' applied to " + std::to_string(args.size()) + " argument(s)");
    }
    return apply_background(term.name, args);
  }
  if (const SymbolInfo* info = ctx.state.signature().find(term.name); info && info->arity != args.size()) {
    throw SpecError("symbol '" + term.name + "' applied to " + std::to_string(args.size()) + " argument(s)");
  }
  return ctx.state.lookup(locate(ctx.state, env.ambient, term.name, std::move(args)));
}

Value eval_term(const State& state, AgentId ambient, const Term& term) {
  EvalContext ctx{state};
  return eval_term(ctx, Environment::of(ambient), term);
}

std::vector<Value> relevant_indices(const State& state, AgentId ambient, const std::string& f) {
  std::vector<Value> out;
  const SymbolInfo* info = state.signature().find(f);
  Location probe;
  if (!info || !info->shared) probe.ambient = ambient;
  probe.symbol = f;
  for (auto it = state.store().lower_bound(probe); it != state.store().end(); ++it) {
    const Location& loc = it->first;
    if (loc.ambient != probe.ambient || loc.symbol != f) break;
    if (loc.args.size() == 1) out.push_back(loc.args[0]);
  }
  return out;
}

namespace {

void normalize(UpdateSetFamily& family) {
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
}

StepUpdate unite(const StepUpdate& a, const StepUpdate& b) {
  StepUpdate out = a;
  out.updates.merge(b.updates);
  out.spawns.insert(out.spawns.end(), b.spawns.begin(), b.spawns.end());
  std::sort(out.spawns.begin(), out.spawns.end());
  out.terminate = a.terminate || b.terminate;
  return out;
}

UpdateSetFamily product(const UpdateSetFamily& a, const UpdateSetFamily& b) {
  UpdateSetFamily out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(unite(x, y));
  }
  normalize(out);
  return out;
}

const UpdateSetFamily kNoop{StepUpdate{}};

std::vector<Value> domain_values(const ForallDomain& d, const EvalContext& ctx, const Environment& env) {
  switch (d.kind) {
    case ForallDomain::Kind::term: {
      Value v = eval_term(ctx, env, *d.lo);
      if (!v.is_list()) return {};
      std::vector<Value> out = v.as_list();
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case ForallDomain::Kind::range: {
      Value lo = eval_term(ctx, env, *d.lo);
      Value hi = eval_term(ctx, env, *d.hi);
      if (!lo.is_int() || !hi.is_int()) return {};
      if (hi.as_int() - lo.as_int() > 1'000'000) throw SpecError("FORALL range too large");
      std::vector<Value> out;
      for (std::int64_t i = lo.as_int(); i < hi.as_int(); ++i) out.push_back(Value(i));
      return out;
    }
    case ForallDomain::Kind::relevant_indices:
      return relevant_indices(ctx.state, env.ambient, d.symbol);
  }
  return {};
}

}  // namespace

StepUpdate call_updates(const Rule& call, const EvalContext& ctx, const Environment& env) {
  std::vector<Value> out_args;
  for (const auto& a : call.target->args) out_args.push_back(eval_term(ctx, env, *a));
  Spawn s;
  s.rule = call.name;
  for (const auto& a : call.args) s.inputs.push_back(eval_term(ctx, env, *a));
  s.output = locate(ctx.state, env.ambient, call.target->name, std::move(out_args));
  s.caller = env.ambient;
  if (ctx.program) {
    if (const RuleDecl* callee = ctx.program->find_rule(call.name)) s.delegate = callee->is_delegate;
  }
  StepUpdate u;
  u.spawns.push_back(std::move(s));
  return u;
}

UpdateSetFamily delta(const Rule& rule, const EvalContext& ctx, const Environment& env) {
  switch (rule.kind) {
    case Rule::Kind::assign: {
      if (rule.target->name == "terminated") {
        StepUpdate u;
        u.terminate = eval_term(ctx, env, *rule.term).is_true();
        return {u};
      }
      std::vector<Value> args;
      for (const auto& a : rule.target->args) args.push_back(eval_term(ctx, env, *a));
      StepUpdate u;
      u.updates.insert({locate(ctx.state, env.ambient, rule.target->name, std::move(args)),
                        eval_term(ctx, env, *rule.term)});
      return {u};
    }
    case Rule::Kind::cond:
      if (eval_term(ctx, env, *rule.term).is_true()) return delta(*rule.children[0], ctx, env);
      return kNoop;
    case Rule::Kind::par: {
      UpdateSetFamily acc = kNoop;
      for (const auto& c : rule.children) acc = product(acc, delta(*c, ctx, env));
      return acc;
    }
    case Rule::Kind::choose: {
      UpdateSetFamily acc;
      for (const auto& c : rule.children) {
        UpdateSetFamily f = delta(*c, ctx, env);
        acc.insert(acc.end(), f.begin(), f.end());
      }
      normalize(acc);
      return acc;
    }
    case Rule::Kind::let: {
      Environment inner = env;
      inner.vars[rule.name] = eval_term(ctx, env, *rule.term);
      return delta(*rule.children[0], ctx, inner);
    }
    case Rule::Kind::call:
      return {call_updates(rule, ctx, env)};
    case Rule::Kind::forall: {
      UpdateSetFamily acc = kNoop;
      Environment inner = env;
      for (const Value& v : domain_values(rule.domain, ctx, env)) {
        inner.vars[rule.name] = v;
        acc = product(acc, delta(*rule.children[0], ctx, inner));
      }
      return acc;
    }
  }
  return kNoop;
}

// ---- bounded exploration witness ----

namespace {

TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& repl) {
  if (t->kind == Term::Kind::variable) return t->name == var ? repl : t;
  if (t->kind != Term::Kind::apply || t->args.empty()) return t;
  bool changed = false;
  std::vector<TermPtr> args;
  for (const auto& a : t->args) {
    args.push_back(substitute(a, var, repl));
    changed = changed || args.back() != a;
  }
  return changed ? Term::apply(t->name, std::move(args), t->span) : t;
}

void close_into(const TermPtr& t, TermSet& out) {
  out.insert(t);
  for (const auto& a : t->args) close_into(a, out);
}

void free_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::variable) out.insert(t.name);
  for (const auto& a : t.args) free_vars(*a, out);
}

// Read terms, write targets, and FORALL domains of a rule, with LET variables
// replaced by their definitions.
struct Witness {
  TermSet reads;
  TermSet targets;
  std::map<std::string, std::vector<ForallDomain>> domains;

  void substitute_all(const std::string& var, const TermPtr& def) {
    TermSet r, t;
    for (const auto& x : reads) close_into(substitute(x, var, def), r);
    for (const auto& x : targets) t.insert(substitute(x, var, def));
    reads = std::move(r);
    targets = std::move(t);
    for (auto& [_, ds] : domains) {
      for (auto& d : ds) {
        if (d.lo) d.lo = substitute(d.lo, var, def);
        if (d.hi) d.hi = substitute(d.hi, var, def);
      }
    }
  }

  void merge(Witness&& o) {
    reads.insert(o.reads.begin(), o.reads.end());
    targets.insert(o.targets.begin(), o.targets.end());
    for (auto& [v, ds] : o.domains) {
      auto& mine = domains[v];
      mine.insert(mine.end(), ds.begin(), ds.end());
    }
  }
};

Witness collect(const Rule& r) {
  Witness w;
  switch (r.kind) {
    case Rule::Kind::assign:
      if (r.target->name != "terminated") {
        for (const auto& a : r.target->args) close_into(a, w.reads);
        w.targets.insert(r.target);
      }
      close_into(r.term, w.reads);
      break;
    case Rule::Kind::cond:
      close_into(r.term, w.reads);
      w.merge(collect(*r.children[0]));
      break;
    case Rule::Kind::par:
    case Rule::Kind::choose:
      for (const auto& c : r.children) w.merge(collect(*c));
      break;
    case Rule::Kind::let: {
      Witness body = collect(*r.children[0]);
      body.substitute_all(r.name, r.term);
      close_into(r.term, w.reads);
      w.merge(std::move(body));
      break;
    }
    case Rule::Kind::call:
      for (const auto& a : r.target->args) close_into(a, w.reads);
      for (const auto& a : r.args) close_into(a, w.reads);
      w.targets.insert(r.target);
      break;
    case Rule::Kind::forall: {
      const auto& d = r.domain;
      if (d.kind == ForallDomain::Kind::relevant_indices) {
        w.reads.insert(Term::apply("relevant_indices", {Term::constant(Value::symbol(d.symbol))}));
      } else {
        close_into(d.lo, w.reads);
        if (d.hi) close_into(d.hi, w.reads);
      }
      w.merge(collect(*r.children[0]));
      w.domains[r.name].push_back(d);
      break;
    }
  }
  return w;
}

bool is_marker(const Term& t) { return t.kind == Term::Kind::apply && t.name == "relevant_indices"; }

// Every binding of the free variables drawn from the union of their domains in
// both states; nullopt when a domain cannot be evaluated on its own.
std::optional<std::vector<std::map<std::string, Value>>> bindings(const std::set<std::string>& vars,
                                                                  const Witness& w, const EvalContext& c1,
                                                                  const EvalContext& c2,
                                                                  const Environment& env) {
  std::vector<std::map<std::string, Value>> out{{}};
  for (const auto& v : vars) {
    auto it = w.domains.find(v);
    if (it == w.domains.end()) return std::nullopt;
    std::set<Value> values;
    for (const auto& d : it->second) {
      for (const EvalContext* c : {&c1, &c2}) {
        try {
          for (auto& x : domain_values(d, *c, env)) values.insert(x);
        } catch (const SpecError&) {
          return std::nullopt;
        }
      }
    }
    std::vector<std::map<std::string, Value>> next;
    for (const auto& b : out) {
      for (const auto& x : values) {
        auto nb = b;
        nb[v] = x;
        next.push_back(std::move(nb));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool same_value(const Term& t, const EvalContext& c1, const EvalContext& c2, const Environment& env) {
  Value v1 = eval_term(c1, env, t);
  Value v2 = eval_term(c2, env, t);
  if (v1 != v2) return false;
  if (t.kind == Term::Kind::apply && !is_background_op(t.name)) {
    std::vector<Value> args;
    for (const auto& a : t.args) args.push_back(eval_term(c1, env, *a));
    if (locate(c1.state, env.ambient, t.name, args) != locate(c2.state, env.ambient, t.name, args)) return false;
  }
  return true;
}

}  // namespace

TermSet read_terms_of(const Rule& rule) { return collect(rule).reads; }

bool coincide_on_witness(const Rule& rule, const State& s1, const State& s2, const Environment& env,
                         const Program* program) {
  Witness w = collect(rule);
  EvalContext c1{s1, program, nullptr};
  EvalContext c2{s2, program, nullptr};
  auto check = [&](const TermPtr& t) {
    if (is_marker(*t)) {
      const std::string& f = t->args[0]->value.as_symbol().name;
      return relevant_indices(s1, env.ambient, f) == relevant_indices(s2, env.ambient, f);
    }
    std::set<std::string> vars;
    free_vars(*t, vars);
    for (auto it = vars.begin(); it != vars.end();) {
      it = env.vars.count(*it) ? vars.erase(it) : std::next(it);
    }
    if (vars.empty()) return same_value(*t, c1, c2, env);
    auto bs = bindings(vars, w, c1, c2, env);
    if (!bs) return false;
    for (const auto& b : *bs) {
      Environment inner = env;
      for (const auto& [k, v] : b) inner.vars[k] = v;
      if (!same_value(*t, c1, c2, inner)) return false;
    }
    return true;
  };
  for (const auto& t : w.reads) {
    if (!check(t)) return false;
  }
  for (const auto& t : w.targets) {
    if (!check(t)) return false;
  }
  return true;
}

bool witness_check(const Rule& rule, const State& s1, const State& s2, const Environment& env,
                   const Program* program, const AgentRegistry* registry) {
  if (!coincide_on_witness(rule, s1, s2, env, program)) return true;
  EvalContext c1{s1, program, registry};
  EvalContext c2{s2, program, registry};
  return delta(rule, c1, env) == delta(rule, c2, env);
}

Spawn apply_isomorphism(const Isomorphism& iso, const Spawn& s) {
  Spawn out = s;
  for (auto& v : out.inputs) v = iso.apply(v);
  out.output = iso.apply(s.output);
  out.caller = iso.apply(s.caller);
  return out;
}

UpdateSetFamily apply_isomorphism(const Isomorphism& iso, const UpdateSetFamily& family) {
  UpdateSetFamily out;
  for (const auto& m : family) {
    StepUpdate u;
    u.updates = iso.apply(m.updates);
    for (const auto& s : m.spawns) u.spawns.push_back(apply_isomorphism(iso, s));
    std::sort(u.spawns.begin(), u.spawns.end());
    u.terminate = m.terminate;
    out.push_back(std::move(u));
  }
  normalize(out);
  return out;
}

}  // namespace recasm

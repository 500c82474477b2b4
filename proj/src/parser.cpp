#include "recasm/parser.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace recasm {

ParseFailure::ParseFailure(std::vector<ParseError> errors)
    : std::runtime_error(errors.empty() ? "parse failed" : errors.front().message), errors_(std::move(errors)) {}

std::string ParseFailure::format(const std::string& file) const {
  std::ostringstream out;
  for (const auto& e : errors_) out << file << ':' << e.line << ':' << e.col << ": " << e.message << '\n';
  return out.str();
}

namespace {

enum class Tok { ident, integer, symbol, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::int64_t number = 0;
  Span span;
};

struct SyntaxError {
  ParseError error;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = {line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::ident;
        t.text = word();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::integer;
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) digits += advance();
        try {
          t.number = std::stoll(digits);
        } catch (const std::out_of_range&) {
          throw SyntaxError{{t.span.line, t.span.col, "integer literal out of range"}};
        }
        t.text = digits;
      } else if (c == '\'') {
        advance();
        if (pos_ >= src_.size() || !(std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          throw SyntaxError{{t.span.line, t.span.col, "expected a symbol name after '"}};
        }
        t.kind = Tok::symbol;
        t.text = word();
      } else {
        t.kind = Tok::punct;
        static const char* two[] = {"->", "<-", ":=", "||", "!=", "<=", ">="};
        for (const char* p : two) {
          if (src_.substr(pos_, 2) == p) {
            t.text = p;
            advance();
            advance();
            break;
          }
        }
        if (t.text.empty()) {
          if (std::string("(){}[],;/=<>+-*|").find(c) == std::string::npos) {
            throw SyntaxError{{t.span.line, t.span.col, std::string("unexpected character '") + c + "'"}};
          }
          t.text = std::string(1, advance());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string word() {
    std::string w;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      w += advance();
    }
    return w;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string> kKeywords = {
    "IF",  "THEN", "PAR",   "CHOOSE", "LET",    "IN",         "FORALL", "DO",       "call",
    "rule", "main", "delegate", "skip", "true", "false", "undef", "and", "or", "not", "div", "mod",
    "range", "relevant_indices", "concurrent", "shared", "observe", "agent", "runs",
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::end) {
      if (is_word("concurrent")) {
        next();
        expect(";");
        p.concurrent = true;
      } else if (is_word("shared")) {
        next();
        std::string name = ident("symbol name");
        expect("/");
        Token n = next();
        if (n.kind != Tok::integer) fail(n, "expected an arity after '/'");
        expect(";");
        p.shared.push_back(name);
        p.shared_arity[name] = static_cast<std::size_t>(n.number);
      } else if (is_word("observe")) {
        next();
        p.observe.push_back(ident("symbol name"));
        expect(";");
      } else if (is_word("agent")) {
        next();
        AgentDecl a;
        a.name = ident("agent name");
        expect_word("runs");
        a.rule = ident("rule name");
        expect(";");
        p.agents.push_back(std::move(a));
      } else {
        p.rules.push_back(rule_decl());
      }
    }
    for (const auto& r : p.rules) {
      if (r.is_main && p.main.empty()) p.main = r.name;
    }
    return p;
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is_punct(const char* p, size_t k = 0) const { return peek(k).kind == Tok::punct && peek(k).text == p; }
  bool is_word(const char* w, size_t k = 0) const { return peek(k).kind == Tok::ident && peek(k).text == w; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SyntaxError{{t.span.line, t.span.col, msg}};
  }

  std::string describe(const Token& t) const {
    if (t.kind == Tok::end) return "end of input";
    if (t.kind == Tok::symbol) return "'" + t.text;
    return "'" + t.text + "'";
  }

  void expect(const char* p) {
    if (!is_punct(p)) fail(peek(), std::string("expected '") + p + "' but found " + describe(peek()));
    next();
  }
  void expect_word(const char* w) {
    if (!is_word(w)) fail(peek(), std::string("expected '") + w + "' but found " + describe(peek()));
    next();
  }
  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::ident || kKeywords.count(t.text)) {
      fail(t, std::string("expected ") + what + " but found " + describe(t));
    }
    return next().text;
  }

  RuleDecl rule_decl() {
    RuleDecl d;
    d.span = peek().span;
    if (is_word("main")) {
      next();
      d.is_main = true;
    }
    if (is_word("delegate")) {
      next();
      d.is_delegate = true;
    }
    expect_word("rule");
    d.name = ident("rule name");
    expect("(");
    if (!is_punct(")")) {
      d.params.push_back(ident("parameter name"));
      while (is_punct(",")) {
        next();
        d.params.push_back(ident("parameter name"));
      }
    }
    expect(")");
    if (is_punct("->")) {
      next();
      d.output = ident("output symbol");
    }
    expect("{");
    d.body = rule();
    expect("}");
    bound_.clear();
    return d;
  }

  RulePtr rule() {
    const Token& t = peek();
    Span s = t.span;
    if (is_word("IF")) {
      next();
      TermPtr c = term();
      expect_word("THEN");
      return Rule::cond(c, rule(), s);
    }
    if (is_word("PAR")) {
      next();
      expect("{");
      std::vector<RulePtr> members;
      if (!is_punct("}")) {
        members.push_back(rule());
        while (is_punct("||")) {
          next();
          members.push_back(rule());
        }
      }
      expect("}");
      return Rule::par(std::move(members), s);
    }
    if (is_word("CHOOSE")) {
      next();
      expect("{");
      std::vector<RulePtr> members;
      members.push_back(rule());
      while (is_punct("|")) {
        next();
        members.push_back(rule());
      }
      expect("}");
      return Rule::choose(std::move(members), s);
    }
    if (is_word("LET")) {
      next();
      std::string var = ident("variable name");
      expect("=");
      TermPtr def = term();
      expect_word("IN");
      bound_.push_back(var);
      RulePtr body = rule();
      bound_.pop_back();
      return Rule::let(var, def, body, s);
    }
    if (is_word("FORALL")) {
      next();
      std::string var = ident("variable name");
      expect_word("IN");
      ForallDomain dom;
      if (is_word("range")) {
        next();
        expect("(");
        dom.kind = ForallDomain::Kind::range;
        dom.lo = term();
        expect(",");
        dom.hi = term();
        expect(")");
      } else if (is_word("relevant_indices")) {
        next();
        expect("(");
        dom.kind = ForallDomain::Kind::relevant_indices;
        dom.symbol = ident("symbol name");
        expect(")");
      } else {
        dom.lo = term();
      }
      expect_word("DO");
      bound_.push_back(var);
      RulePtr body = rule();
      bound_.pop_back();
      return Rule::forall(var, std::move(dom), body, s);
    }
    if (is_word("call")) {
      next();
      TermPtr out = term();
      expect("<-");
      std::string name = ident("rule name");
      expect("(");
      std::vector<TermPtr> args;
      if (!is_punct(")")) {
        args.push_back(term());
        while (is_punct(",")) {
          next();
          args.push_back(term());
        }
      }
      expect(")");
      return Rule::call(out, name, std::move(args), s);
    }
    if (is_word("skip")) {
      next();
      return Rule::skip(s);
    }
    if (is_punct("{")) {
      next();
      RulePtr r = rule();
      expect("}");
      return r;
    }
    if (t.kind != Tok::ident || kKeywords.count(t.text)) fail(t, "expected a rule but found " + describe(t));
    TermPtr target = term();
    expect(":=");
    TermPtr value = term();
    return Rule::assign(target, value, s);
  }

  // Precedence, loosest first: or, and, not, comparison, additive,
  // multiplicative, unary minus.
  TermPtr term() { return disjunction(); }

  TermPtr disjunction() {
    TermPtr left = conjunction();
    while (is_word("or")) {
      Span s = next().span;
      left = Term::apply("or", {left, conjunction()}, s);
    }
    return left;
  }

  TermPtr conjunction() {
    TermPtr left = negation();
    while (is_word("and")) {
      Span s = next().span;
      left = Term::apply("and", {left, negation()}, s);
    }
    return left;
  }

  TermPtr negation() {
    if (is_word("not")) {
      Span s = next().span;
      return Term::apply("not", {negation()}, s);
    }
    return comparison();
  }

  TermPtr comparison() {
    TermPtr left = additive();
    static const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
    for (const char* op : ops) {
      if (is_punct(op)) {
        Span s = next().span;
        return Term::apply(op, {left, additive()}, s);
      }
    }
    return left;
  }

  TermPtr additive() {
    TermPtr left = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      Token op = next();
      left = Term::apply(op.text, {left, multiplicative()}, op.span);
    }
    return left;
  }

  TermPtr multiplicative() {
    TermPtr left = unary();
    while (is_punct("*") || is_word("div") || is_word("mod")) {
      Token op = next();
      left = Term::apply(op.text, {left, unary()}, op.span);
    }
    return left;
  }

  TermPtr unary() {
    if (is_punct("-")) {
      Span s = next().span;
      TermPtr inner = unary();
      if (inner->kind == Term::Kind::constant && inner->value.is_int()) {
        return Term::constant(Value(-inner->value.as_int()), s);
      }
      return Term::apply("neg", {inner}, s);
    }
    return primary();
  }

  TermPtr primary() {
    Token t = peek();
    if (t.kind == Tok::integer) {
      next();
      return Term::constant(Value(t.number), t.span);
    }
    if (t.kind == Tok::symbol) {
      next();
      return Term::constant(Value::symbol(t.text), t.span);
    }
    if (is_word("true") || is_word("false")) {
      next();
      return Term::constant(Value(t.text == "true"), t.span);
    }
    if (is_word("undef")) {
      next();
      return Term::constant(kUndef, t.span);
    }
    if (is_punct("(")) {
      next();
      TermPtr inner = term();
      expect(")");
      return inner;
    }
    if (is_punct("[")) {
      next();
      std::vector<TermPtr> items;
      if (!is_punct("]")) {
        items.push_back(term());
        while (is_punct(",")) {
          next();
          items.push_back(term());
        }
      }
      expect("]");
      return Term::apply("list", std::move(items), t.span);
    }
    if (t.kind == Tok::ident && (!kKeywords.count(t.text) || t.text == "div" || t.text == "mod" ||
                                 t.text == "not")) {
      if (kKeywords.count(t.text) && !is_punct("(", 1)) fail(t, "unexpected " + describe(t));
      next();
      if (is_punct("(")) {
        next();
        std::vector<TermPtr> args;
        if (!is_punct(")")) {
          args.push_back(term());
          while (is_punct(",")) {
            next();
            args.push_back(term());
          }
        }
        expect(")");
        return Term::apply(t.text, std::move(args), t.span);
      }
      for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
        if (*it == t.text) return Term::variable(t.text, t.span);
      }
      return Term::apply(t.text, {}, t.span);
    }
    fail(t, "expected a term but found " + describe(t));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<std::string> bound_;
};

// Static checks over a program, collecting every error found.
class Checker {
 public:
  explicit Checker(Program& p) : p_(p) {}

  void run() {
    std::set<std::string> names;
    int mains = 0;
    for (const auto& r : p_.rules) {
      if (!names.insert(r.name).second) error(r.span, "rule '" + r.name + "' is declared twice");
      if (r.is_main) ++mains;
      std::set<std::string> ps;
      for (const auto& param : r.params) {
        if (!ps.insert(param).second) error(r.span, "parameter '" + param + "' repeated in rule '" + r.name + "'");
      }
    }
    if (!p_.is_static() && mains == 0) error({1, 1}, "missing main rule");
    if (mains > 1) error({1, 1}, "more than one main rule");
    if (p_.is_static() && !p_.concurrent) error({1, 1}, "agent declarations require 'concurrent;'");
    p_.main.clear();
    for (const auto& r : p_.rules) {
      if (r.is_main) {
        p_.main = r.name;
        break;
      }
    }
    for (const auto& a : p_.agents) {
      const RuleDecl* r = p_.find_rule(a.rule);
      if (!r) {
        error({1, 1}, "agent '" + a.name + "' runs undeclared rule '" + a.rule + "'");
      } else if (!r->params.empty()) {
        error(r->span, "rule '" + a.rule + "' run by a static agent cannot take parameters");
      }
    }

    for (const auto& name : p_.shared) declare(name, p_.shared_arity.at(name), SymbolKind::local, true, {1, 1});
    for (const auto& r : p_.rules) {
      for (const auto& param : r.params) declare(param, 0, SymbolKind::input, false, r.span);
      if (!r.output.empty()) declare(r.output, 0, SymbolKind::output, false, r.span);
    }
    for (const auto& r : p_.rules) collect_call_outputs(*r.body);
    for (const auto& r : p_.rules) {
      current_ = &r;
      check_rule(*r.body, false);
    }
    for (const auto& o : p_.observe) {
      if (!sig_.contains(o)) error({1, 1}, "observed symbol '" + o + "' does not occur in the program");
    }
    if (!errors_.empty()) throw ParseFailure(errors_);
    p_.signature = std::make_shared<const Signature>(sig_);
  }

 private:
  void error(Span s, std::string msg) { errors_.push_back({s.line, s.col, std::move(msg)}); }

  void declare(const std::string& name, std::size_t arity, SymbolKind kind, bool shared, Span s) {
    if (name == "terminated") {
      error(s, "'terminated' is reserved");
      return;
    }
    if (is_background_op(name) || name == "list") {
      error(s, "'" + name + "' is a background operation and cannot be a signature symbol");
      return;
    }
    if (const SymbolInfo* old = sig_.find(name)) {
      if (old->shared && !shared && kind != SymbolKind::local) {
        error(s, "shared symbol '" + name + "' cannot be a rule input or output");
        return;
      }
      // Plain uses of an existing symbol only re-check arity.
      if (kind == SymbolKind::local && !shared) {
        if (old->arity != arity) {
          error(s, "symbol '" + name + "' used with arity " + std::to_string(arity) + " but has arity " +
                       std::to_string(old->arity));
        }
        return;
      }
    }
    try {
      sig_.declare({name, arity, kind, shared});
    } catch (const SpecError& e) {
      error(s, e.what());
    }
  }

  void collect_call_outputs(const Rule& r) {
    if (r.kind == Rule::Kind::call && r.target && r.target->kind == Term::Kind::apply &&
        !is_background_op(r.target->name)) {
      declare(r.target->name, r.target->args.size(), SymbolKind::output, false, r.target->span);
    }
    for (const auto& c : r.children) collect_call_outputs(*c);
  }

  void check_term(const TermPtr& t) {
    if (t->kind != Term::Kind::apply) return;
    for (const auto& a : t->args) check_term(a);
    if (t->name == "terminated") {
      error(t->span, "'terminated' can only be assigned");
      return;
    }
    if (is_background_op(t->name)) {
      int arity = background_arity(t->name);
      if (arity >= 0 && static_cast<std::size_t>(arity) != t->args.size()) {
        error(t->span, "'" + t->name + "' expects " + std::to_string(arity) + " argument(s), got " +
                           std::to_string(t->args.size()));
      }
      if (is_registry_predicate(t->name) && !p_.concurrent) {
        error(t->span, "'" + t->name + "()' is only available in concurrent programs");
      }
      return;
    }
    declare(t->name, t->args.size(), SymbolKind::local, false, t->span);
  }

  void check_rule(const Rule& r, bool in_forall) {
    switch (r.kind) {
      case Rule::Kind::assign: {
        const TermPtr& target = r.target;
        if (target->kind != Term::Kind::apply) {
          error(target->span, "cannot assign to variable '" + target->name + "'");
        } else if (target->name == "terminated") {
          if (!target->args.empty()) error(target->span, "'terminated' takes no arguments");
        } else if (is_background_op(target->name)) {
          error(target->span, "cannot assign to background operation '" + target->name + "'");
        } else {
          check_term(target);
          const SymbolInfo* info = sig_.find(target->name);
          if (info && info->kind == SymbolKind::input) {
            error(target->span, "rule '" + current_->name + "' assigns to input symbol '" + target->name +
                                    "' (Input/Output Assumption: input locations are only read)");
          }
        }
        check_term(r.term);
        break;
      }
      case Rule::Kind::cond:
      case Rule::Kind::let:
        check_term(r.term);
        break;
      case Rule::Kind::call: {
        if (in_forall) error(r.span, "call to '" + r.name + "' inside FORALL (call sites must be bounded)");
        const RuleDecl* callee = p_.find_rule(r.name);
        if (!callee) {
          error(r.span, "call to undeclared rule '" + r.name + "'");
        } else if (callee->params.size() != r.args.size()) {
          error(r.span, "rule '" + r.name + "' expects " + std::to_string(callee->params.size()) +
                            " argument(s), got " + std::to_string(r.args.size()));
        }
        if (r.target->kind != Term::Kind::apply || is_background_op(r.target->name) ||
            r.target->name == "terminated") {
          error(r.target->span, "call output must be a location term");
        } else {
          for (const auto& a : r.target->args) check_term(a);
          for (const auto& a : r.args) {
            if (a->kind == Term::Kind::apply && a->name == r.target->name) {
              error(a->span, "call output symbol '" + a->name + "' also heads an argument");
            }
          }
        }
        for (const auto& a : r.args) check_term(a);
        break;
      }
      case Rule::Kind::forall:
        if (r.domain.kind == ForallDomain::Kind::relevant_indices) {
          const SymbolInfo* info = sig_.find(r.domain.symbol);
          if (!info) {
            declare(r.domain.symbol, 1, SymbolKind::local, false, r.span);
          } else if (info->arity != 1) {
            error(r.span, "relevant_indices needs a unary symbol, '" + r.domain.symbol + "' has arity " +
                              std::to_string(info->arity));
          }
        } else {
          check_term(r.domain.lo);
          if (r.domain.hi) check_term(r.domain.hi);
        }
        for (const auto& c : r.children) check_rule(*c, true);
        return;
      default:
        break;
    }
    for (const auto& c : r.children) check_rule(*c, in_forall);
  }

  Program& p_;
  Signature sig_;
  const RuleDecl* current_ = nullptr;
  std::vector<ParseError> errors_;
};

}  // namespace

void check_program(Program& program) { Checker(program).run(); }

Program parse(std::string_view source) {
  Program p;
  try {
    p = Parser(Lexer(source).run()).program();
  } catch (const SyntaxError& e) {
    throw ParseFailure({e.error});
  }
  check_program(p);
  return p;
}

Program parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseFailure({{0, 0, "cannot open file"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace recasm

#include <doctest.h>

#include "recasm/parser.hpp"
#include "recasm/printer.hpp"
#include "support.hpp"

using namespace recasm;

namespace {

std::string errors_of(const std::string& src) {
  try {
    parse(src);
  } catch (const ParseFailure& e) {
    return e.format("t.recasm");
  }
  return "";
}

}  // namespace

TEST_CASE("corpus programs print and parse back to the same program") {
  for (const char* f : {"mergesort", "quicksort", "sieve", "pmergesort", "pquicksort", "counters", "relay",
                        "conflict"}) {
    CAPTURE(f);
    Program p = support::load(f);
    std::string text = pretty_print(p);
    Program q = parse(text);
    CHECK(programs_equal(p, q));
    CHECK(pretty_print(q) == text);
  }
}

TEST_CASE("signature kinds come from params, outputs and call outputs") {
  Program p = support::load("mergesort");
  const Signature& sig = *p.signature;
  CHECK(sig.find("unsorted_list")->kind == SymbolKind::input);
  CHECK(sig.find("sorted_list")->kind == SymbolKind::output);
  CHECK(sig.find("sorted_list1")->kind == SymbolKind::output);
  CHECK(sig.find("merged_restlist")->kind == SymbolKind::output);
  CHECK(p.main == "sort");
  CHECK(p.branching_bound() == 3);  // three call sites in sort
  CHECK_FALSE(sig.contains("list1"));  // LET variable
}

TEST_CASE("precedence and unary minus") {
  Program p = parse("main rule m() -> o { o := 1 + 2 * 3 - -4 }");
  const Rule& r = *p.rule("m").body;
  CHECK(print_term(*r.term) == "((1 + (2 * 3)) - -4)");
  Program q = parse("main rule m(a) -> o { o := -a < 3 and not a = 2 or false }");
  CHECK(print_term(*q.rule("m").body->term) == "((((-a) < 3) and (not (a = 2))) or false)");
}

TEST_CASE("syntax errors carry file, line and column") {
  CHECK(errors_of("main rule m() -> o {\n  o := \n}") == "t.recasm:3:1: expected a term but found '}'\n");
  CHECK(errors_of("main rule m() { o := 1 = 2 = 3 }").find("t.recasm:1:") == 0);
  CHECK(errors_of("main rule m() { IF 1 THEN }").find("t.recasm:1:") == 0);
}

TEST_CASE("static errors are all reported") {
  std::string e = errors_of(
      "rule a(x) -> o { PAR { x := 1 || call o <- b(1, 2) || terminated(1) := true } }\n"
      "rule a() { skip }\n");
  CHECK(e.find("missing main rule") != std::string::npos);
  CHECK(e.find("rule 'a' is declared twice") != std::string::npos);
  CHECK(e.find("assigns to input symbol 'x'") != std::string::npos);
  CHECK(e.find("call to undeclared rule 'b'") != std::string::npos);
  CHECK(e.find("'terminated' takes no arguments") != std::string::npos);
}

TEST_CASE("call restrictions") {
  CHECK(errors_of("main rule m(l) -> o { call o <- m(o) }").find("also heads an argument") != std::string::npos);
  CHECK(errors_of("main rule m(l) -> o { FORALL x IN l DO call o(x) <- m(x) }").find("inside FORALL") !=
        std::string::npos);
  CHECK(errors_of("main rule m(l) -> o { call o <- m(1, 2) }").find("expects 1 argument(s), got 2") !=
        std::string::npos);
  CHECK(errors_of("main rule m() -> o { PAR { f := 1 || f(2) := 1 } }").find("arity") != std::string::npos);
}

TEST_CASE("registry predicates and shared symbols") {
  CHECK(errors_of("main rule m() { IF active() THEN skip }").find("only available in concurrent programs") !=
        std::string::npos);
  CHECK(errors_of("concurrent; main rule m() { IF active() and not waiting() THEN skip }").empty());
  CHECK(errors_of("shared c/0; main rule m(c) { skip }").find("cannot be a rule input") != std::string::npos);
  CHECK(errors_of("agent A runs r; rule r() { skip }").find("require 'concurrent;'") != std::string::npos);
  CHECK(errors_of("concurrent; agent A runs r; rule r() { skip }").empty());
  CHECK(errors_of("concurrent; agent A runs r; rule r(x) { skip }").find("cannot take parameters") !=
        std::string::npos);
}

TEST_CASE("terms, domains and keywords") {
  CHECK(errors_of("main rule m(l) -> o { o := head(l, 1) }").find("'head' expects 1 argument(s), got 2") !=
        std::string::npos);
  CHECK(errors_of("main rule m() -> o { FORALL i IN relevant_indices(o) DO skip }").find("unary symbol") !=
        std::string::npos);
  CHECK(errors_of("main rule m() -> o { o := terminated }").find("can only be assigned") != std::string::npos);
  CHECK(errors_of("main rule m() { LET x = 1 IN x := 2 }").find("cannot assign to variable") != std::string::npos);
  CHECK(errors_of("observe nope; main rule m() { skip }").find("does not occur") != std::string::npos);
  CHECK_FALSE(errors_of("main rule rule() { skip }").empty());
  Program p = parse("main rule m() -> o { FORALL i IN range(0, 3) DO f(i) := [i, 'a, undef, true] }");
  CHECK(p.signature->find("f")->arity == 1);
}

TEST_CASE("comments and empty blocks") {
  Program p = parse("// top\nmain rule m() {\n  PAR {} // nothing\n}\n");
  CHECK(p.rule("m").body->kind == Rule::Kind::par);
  CHECK(p.rule("m").body->children.empty());
}

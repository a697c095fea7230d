#include <doctest.h>

#include <algorithm>

#include "whilecc/lang.hpp"
#include "whilecc/programs.hpp"

using namespace whilecc;

namespace {

std::string error_code(const char* src) {
  try {
    parse_program(src);
  } catch (const ParseError& e) {
    return e.diagnostic().code;
  }
  return "";
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

std::vector<const StdlibEntry*> all_entries() {
  std::vector<const StdlibEntry*> out;
  for (const auto& e : stdlib()) out.push_back(&e);
  for (const auto& e : fixtures()) out.push_back(&e);
  return out;
}

}  // namespace

TEST_SUITE("lang") {
  TEST_CASE("pivot parses to a single choose assignment after the init") {
    Program prog = program_entry("pivot").parse();
    const Procedure& p = prog.procedure("pivot");
    CHECK(p.in.size() == 3);
    REQUIRE(p.out.size() == 1);
    CHECK(p.out[0].sort == Sort::nat());
    CHECK(contains_choose(*p.body));
    CHECK(starts_with_init(p, prog.algebra->signature()));
  }

  TEST_CASE("anonymous procedure with a default assignment is valid") {
    Procedure p = parse("func in a:real out b:real begin b:=default; b:=a end");
    CHECK(p.in.size() == 1);
    CHECK(p.body->kind == Stmt::Kind::Seq);
    CHECK(validate(p, shared_builtin("RN*")->signature()).empty());
  }

  TEST_CASE("assigning an input variable is rejected") {
    CHECK(error_code("func f in a:real out b:real begin a := b end") == "input-assigned");
  }

  TEST_CASE("auto_init prepends the default assignment and is idempotent") {
    Procedure p = parse("algebra RN*\nfunc f in x: real out y: nat aux z*: real* begin y := Lgth(z*) end");
    const Signature& sig = shared_builtin("RN*")->signature();
    CHECK(starts_with_init(p, sig));
    CHECK(equal(auto_init(p, sig), p));

    Procedure draft = p;
    REQUIRE(draft.body->kind == Stmt::Kind::Seq);
    draft.body = draft.body->second;
    CHECK_FALSE(starts_with_init(draft, sig));
    CHECK(equal(auto_init(draft, sig), p));
  }

  TEST_CASE("auto_init initialises out and aux in frame order") {
    Procedure p = parse("algebra RN*\nfunc f in x: real out y: nat aux z*: real* begin y := Lgth(z*) end");
    const Stmt& init = *p.body->first;
    REQUIRE(init.kind == Stmt::Kind::Assign);
    std::vector<std::string> want = {"y", "z*"};
    CHECK(init.lhs == want);
  }

  TEST_CASE("validate_star") {
    Program exp = program_entry("exp_approx").parse();
    const Procedure& e = exp.procedures.front();
    CHECK_NOTHROW(validate_star(e));
    CHECK_THROWS_AS(validate_star(e, true), ParseError);

    CHECK_NOTHROW(validate_star(parse("algebra N*\nfunc f in n: nat out b: nat aux choices*: nat* "
                                      "begin b := Lgth(choices*) end")));

    Procedure starred = parse("algebra RN*\nfunc f in x: real out y: real* begin skip end");
    try {
      validate_star(starred);
      FAIL("starred output accepted");
    } catch (const ParseError& err) {
      CHECK(err.diagnostic().code == "star-restriction");
    }
  }

  TEST_CASE("every library program validates") {
    for (const StdlibEntry* e : all_entries()) {
      Program prog = e->parse();
      for (const Procedure& p : prog.procedures)
        CHECK_MESSAGE(validate(p, prog.algebra->signature()).empty(), e->name);
    }
  }

  TEST_CASE("print then parse is the identity on every library program") {
    for (const StdlibEntry* e : all_entries()) {
      Program prog = e->parse();
      Program again = parse_program(print(prog));
      REQUIRE(again.procedures.size() == prog.procedures.size());
      for (std::size_t i = 0; i < prog.procedures.size(); ++i)
        CHECK_MESSAGE(equal(again.procedures[i], prog.procedures[i]), e->name);
    }
  }

  TEST_CASE("for loops desugar to while loops") {
    Procedure p = parse("algebra N\nfunc f in n: nat out s: nat begin s := 0; for j := 1 to n do s := s + j od end");
    std::string text = print(p);
    CHECK(text.find("while") != std::string::npos);
    CHECK(text.find("for") == std::string::npos);
  }

  TEST_CASE("diagnostics") {
    CHECK(error_code("func f in x: real out y: real begin y := x +  end") != "");
    CHECK(error_code("func f in x: real out y: nat begin y := x end") == "sort-mismatch");
    CHECK(error_code("func f in x: nat out y: nat begin y := w end") == "undeclared-variable");
    CHECK(error_code("func f in x: nat out y: nat begin y := frob(x) end") == "unknown-symbol");
    CHECK(error_code("func f in x: nat out y: nat begin if x then y := 1 else skip fi end") == "guard-not-bool");
    CHECK(error_code("func f in x: nat out y: nat begin y, y := x, x end") == "lhs-not-distinct");
    CHECK(error_code("func f in x: nat out x: nat begin skip end") == "duplicate-variable");
    CHECK(error_code("algebra Q\nfunc f in x: nat out y: nat begin skip end") == "unknown-algebra");
    CHECK(error_code("func f in x: nat out y: nat begin y := x # 1 end") == "bad-character");
    CHECK(error_code("func f in x: nat out y: nat begin { y := x end") == "unterminated-comment");
  }

  TEST_CASE("diagnostics carry a location") {
    try {
      parse_program("algebra N\nfunc f in x: nat out y: nat\nbegin\n  y := w\nend");
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(e.diagnostic().loc.line == 4);
      CHECK(e.diagnostic().to_string().find("undeclared") != std::string::npos);
    }
  }

  TEST_CASE("choose over pairs and rationals is sugar over nat choose") {
    Procedure p = parse(
        "algebra RN*\nfunc f in x: real out a, b: nat begin a, b := choose z1, z2 : z1 + z2 = 3 end");
    CHECK(contains_choose(*p.body));
  }
}

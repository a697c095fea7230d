#include <doctest.h>

#include <set>

#include "whilecc/lang.hpp"
#include "whilecc/programs.hpp"

using namespace whilecc;

namespace {

Value real(const Rational& q) { return Value::real(Real(q)); }
Value nat(unsigned long n) { return Value::nat(Natural(n)); }

struct Loaded {
  Program prog;
  const StdlibEntry* entry;
  const Procedure& proc() const { return prog.procedure(entry->procedure); }
  const PartialAlgebra& algebra() const { return *prog.algebra; }
};

Loaded load(const std::string& name) {
  const StdlibEntry& e = program_entry(name);
  return Loaded{e.parse(), &e};
}

ApproxOptions options(std::optional<std::size_t> slot, std::vector<ChoiceStrategy> strategies = {ChoiceStrategy::dovetail()},
                      std::uint64_t fuel = 1'000'000) {
  ApproxOptions o;
  o.precision_input = slot;
  o.strategies = std::move(strategies);
  o.fuel = fuel;
  return o;
}

std::string report_text(const ApproxReport& r) {
  std::string s;
  for (const auto& l : r.lines())
    if (l.rfind("FAIL", 0) == 0) s += l + "\n";
  return s;
}

}  // namespace

TEST_SUITE("programs") {
  TEST_CASE("the library is complete and well formed") {
    std::set<std::string> names;
    for (const auto& e : stdlib()) {
      names.insert(e.name);
      CHECK(e.paper_example);
      CHECK(known_oracle(e.oracle));
    }
    CHECK(names == std::set<std::string>{"pivot", "exp_approx", "choose_near", "root_bisect"});
    for (const auto& e : fixtures()) CHECK_MESSAGE(known_oracle(e.oracle), e.name);
    CHECK_THROWS_AS(program_entry("no_such_program"), std::out_of_range);
  }

  TEST_CASE("exp_approx at n = 2, x = 1") {
    Loaded l = load("exp_approx");
    const Rational want(109601, 40320);
    CHECK(oracles::exp_partial_sum(1, 2) == want);
    for (const ChoiceStrategy& s : {ChoiceStrategy::dovetail(), ChoiceStrategy::oracle(3), ChoiceStrategy::enumerate()}) {
      ResultSet r = run_procedure(l.algebra(), l.proc(), {nat(2), Value::interval(Real(Rational(1)))}, s, 1'000'000);
      REQUIRE(r.singleton());
      CHECK(r.values[0][0].as_real().exact() == want);
    }
  }

  TEST_CASE("pivot at the origin diverges") {
    Loaded l = load("pivot");
    ResultSet r = run_procedure(l.algebra(), l.proc(), {real(0), real(0), real(0)}, ChoiceStrategy::dovetail(), 20000);
    CHECK(r.empty());
    CHECK(r.maybe_divergent);
  }

  TEST_CASE("choose_near at 355/113") {
    Loaded l = load("choose_near");
    const Rational a(355, 113);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      ResultSet r = run_procedure(l.algebra(), l.proc(), {real(a), nat(3)}, ChoiceStrategy::dovetail(seed), 1'000'000);
      REQUIRE(r.singleton());
      const Real& x = r.values[0][0].as_real();
      REQUIRE(x.is_exact());  // in the range of the rational enumeration
      CHECK(abs(Rational(x.exact() - a)) < Rational(1, 8));
    }
  }

  TEST_CASE("single-valued harness: exp_approx against the Taylor oracle") {
    Loaded l = load("exp_approx");
    std::vector<ValueTuple> xs;
    for (const Rational& q : {Rational(0), Rational(1, 2), Rational(1)}) xs.push_back({Value::interval(Real(q))});
    ApproxReport r = check_single_approx(l.algebra(), l.proc(), single_oracle("exp"), xs, 0, 10, options(0));
    CHECK_MESSAGE(r.passed(), report_text(r));
    CHECK(r.cells.size() == 33);
    for (const auto& c : r.cells) CHECK(c.max_deviation < pow2(-static_cast<long>(c.n)));
  }

  TEST_CASE("single-valued harness: constant program has deviation 0") {
    Procedure c = parse("algebra RN\nfunc c in n: nat, x: real out y: real begin y := 5 / 4 end");
    SingleOracle F = [](const ValueTuple&, unsigned) -> std::optional<std::vector<Enclosure>> {
      return std::vector<Enclosure>{{Rational(5, 4), 0}};
    };
    ApproxReport r = check_single_approx(*shared_builtin("RN"), c, F, {{real(0)}, {real(Rational(-3, 7))}}, 0, 6, options(0));
    CHECK(r.passed());
    for (const auto& cell : r.cells) CHECK(cell.max_deviation == 0);
  }

  TEST_CASE("single-valued harness: an off-by-one program fails") {
    std::string src = program_entry("exp_approx").source;
    std::size_t at = src.find("s := 1;");
    REQUIRE(at != std::string::npos);
    src.replace(at, 7, "s := 2;");
    Program bad = parse_program(src);
    ApproxReport r = check_single_approx(*bad.algebra, bad.procedures.front(), single_oracle("exp"),
                                         {{Value::interval(Real(Rational(1, 2)))}}, 1, 4, options(0));
    CHECK_FALSE(r.passed());
    CHECK(r.failures() == r.cells.size());
  }

  TEST_CASE("single-valued harness: strict mode outside the domain") {
    Procedure inv = parse("algebra RN\nfunc f in n: nat, x: real out y: real begin y := 1 / x end");
    SingleOracle F = [](const ValueTuple& x, unsigned) -> std::optional<std::vector<Enclosure>> {
      Rational q = x.at(0).as_real().exact();
      if (q == 0) return std::nullopt;
      return std::vector<Enclosure>{{Rational(1 / q), 0}};
    };
    ApproxOptions o = options(0, {ChoiceStrategy::dovetail()}, 20000);
    o.strict = true;
    ApproxReport r = check_single_approx(*shared_builtin("RN"), inv, F, {{real(0)}, {real(4)}}, 0, 2, o);
    CHECK_MESSAGE(r.passed(), report_text(r));
  }

  TEST_CASE("multi-valued harness: pivot on the nonzero sign patterns") {
    Loaded l = load("pivot");
    std::vector<ValueTuple> xs;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c)
          if (a || b || c) xs.push_back({real(a), real(b), real(c)});
    REQUIRE(xs.size() == 26);
    ApproxReport r = check_multi_approx(l.algebra(), l.proc(), multi_oracle("pivot_set"), xs, 0, 0,
                                        options(std::nullopt, {ChoiceStrategy::enumerate()}, 200000));
    CHECK_MESSAGE(r.passed(), report_text(r));
    for (const auto& cov : r.coverage) {
      CHECK(cov.covered == cov.targets);
      CHECK(cov.distinct_outputs == cov.targets);
    }
  }

  TEST_CASE("multi-valued harness: bisection on f_0 reaches several roots") {
    Loaded l = load("root_bisect_fa");
    ApproxReport r = check_multi_approx(l.algebra(), l.proc(), multi_oracle("fa_roots"), {{real(0)}}, 4, 4,
                                        options(0, dovetail_seeds(0, 50)));
    CHECK_MESSAGE(r.passed(), report_text(r));
    REQUIRE(r.coverage.size() == 1);
    CHECK(r.coverage[0].targets == 3);
    CHECK(r.coverage[0].covered >= 2);
  }

  TEST_CASE("multi-valued harness: bisection on X^2 - 2") {
    Loaded l = load("root_bisect");
    ApproxReport r = check_multi_approx(l.algebra(), l.proc(), multi_oracle("poly_roots"),
                                        {{polynomial_value({1, 0, -2})}}, 0, 6, options(0, dovetail_seeds(0, 3)));
    CHECK_MESSAGE(r.passed(), report_text(r));
    for (const auto& cell : r.cells) CHECK(cell.max_deviation < pow2(-static_cast<long>(cell.n)));
  }

  TEST_CASE("bisection outputs bracket a root") {
    Loaded l = load("root_bisect");
    const std::vector<Rational> p = {1, 0, -1, 0};  // X^3 - X
    auto f = [&](const Rational& x) { return oracles::polynomial(p, x); };
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      for (unsigned n = 1; n <= 6; ++n) {
        ResultSet r = run_procedure(l.algebra(), l.proc(), {nat(n), polynomial_value(p)}, ChoiceStrategy::dovetail(seed),
                                    1'000'000);
        REQUIRE(r.singleton());
        Rational v = r.values[0][0].as_real().exact();
        CHECK(oracles::brackets_root(f, v, pow2(1 - static_cast<long>(n))));
      }
    }
  }

  TEST_CASE("bisection diverges without simple roots") {
    Loaded l = load("root_bisect");
    for (const std::vector<Rational>& p : {std::vector<Rational>{1, 0, 0}, std::vector<Rational>{1, 0, 1}}) {
      for (std::uint64_t fuel : {10'000, 100'000}) {
        ResultSet r = run_procedure(l.algebra(), l.proc(), {nat(2), polynomial_value(p)}, ChoiceStrategy::dovetail(), fuel);
        CHECK(r.empty());
        CHECK(r.maybe_divergent);
      }
    }
  }

  TEST_CASE("exp_approx is strategy invariant") {
    Loaded l = load("exp_approx");
    ValueTuple x = {nat(3), Value::interval(Real(Rational(3, 4)))};
    ResultSet base = run_procedure(l.algebra(), l.proc(), x, ChoiceStrategy::dovetail(), 1'000'000);
    REQUIRE(base.singleton());
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      for (const ChoiceStrategy& s : {ChoiceStrategy::dovetail(seed), ChoiceStrategy::oracle(seed)}) {
        ResultSet r = run_procedure(l.algebra(), l.proc(), x, s, 1'000'000);
        REQUIRE(r.singleton());
        CHECK(identical(r.values[0], base.values[0]));
      }
  }

  TEST_CASE("exact programs agree with their oracles") {
    for (const char* name : {"least_divisor", "isqrt"}) {
      Loaded l = load(name);
      SingleOracle F = single_oracle(l.entry->oracle);
      std::vector<ValueTuple> xs;
      for (unsigned n = 0; n <= 30; ++n) xs.push_back({nat(n)});
      ApproxReport r = check_single_approx(l.algebra(), l.proc(), F, xs, 0, 0, options(std::nullopt));
      CHECK_MESSAGE(r.passed(), report_text(r));
    }
    CHECK(oracles::least_divisor(91) == 7);
    CHECK(oracles::isqrt(99) == 9);
  }

  TEST_CASE("the horner primitive agrees with a While loop") {
    Program prog = parse_program(
        "algebra RN*\n"
        "func loop in p*: real*, x: real out y: real aux i: nat begin\n"
        "  y := 0; i := 0;\n"
        "  while i < Lgth(p*) do y := y * x + Ap(p*, i); i := i + 1 od\n"
        "end\n"
        "func prim in p*: real*, x: real out y: real begin y := horner(p*, x) end");
    for (const std::vector<Rational>& p : {std::vector<Rational>{1, 0, -2}, std::vector<Rational>{Rational(3, 2), -1, 0, 7},
                                           std::vector<Rational>{}}) {
      for (const Rational& x : {Rational(0), Rational(-5, 3), Rational(2)}) {
        ValueTuple in = {polynomial_value(p), real(x)};
        ResultSet a = run_procedure(*prog.algebra, prog.procedure("loop"), in, ChoiceStrategy::dovetail(), 100000);
        ResultSet b = run_procedure(*prog.algebra, prog.procedure("prim"), in, ChoiceStrategy::dovetail(), 100000);
        REQUIRE(a.singleton());
        REQUIRE(b.singleton());
        CHECK(a.values[0][0].as_real().exact() == oracles::polynomial(p, x));
        CHECK(b.values[0][0].as_real().exact() == oracles::polynomial(p, x));
      }
    }
  }

  TEST_CASE("with_window and enclosures") {
    std::string src = with_window(program_entry("root_bisect").source, 3);
    CHECK(src.find("def W(): real = 3") != std::string::npos);
    CHECK_NOTHROW(parse_program(src));

    auto e = enclose_value(real(Rational(1, 3)), 10);
    REQUIRE(e);
    CHECK(e->radius == 0);
    CHECK(deviation_bound({Rational(0), Rational(1, 8)}, {Rational(1, 2), Rational(1, 8)}) == Rational(3, 4));
  }
}

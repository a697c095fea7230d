#include <doctest.h>

#include <algorithm>
#include <set>

#include "whilecc/interp.hpp"
#include "whilecc/lang.hpp"
#include "whilecc/programs.hpp"

using namespace whilecc;

namespace {

// A procedure and its body with the init assignment stripped.
struct Fixture {
  Program prog;
  const Procedure& proc() const { return prog.procedures.front(); }
  StmtPtr body() const { return proc().body->second; }
  State state(const ValueTuple& x) const { return Machine(*prog.algebra, ChoiceStrategy::dovetail()).initial_state(proc(), x); }
};

Fixture fixture(const char* src) { return Fixture{parse_program(src)}; }

Value real(const Rational& q) { return Value::real(Real(q)); }
Value nat(unsigned long n) { return Value::nat(Natural(n)); }

std::set<unsigned long> nat_outputs(const ResultSet& r, std::size_t slot = 0) {
  std::set<unsigned long> out;
  for (const auto& v : r.values) out.insert(v.at(slot).as_nat().get_ui());
  return out;
}

// The value bound to `slot` in each state.
std::set<unsigned long> nat_slots(const std::vector<State>& states, int slot) {
  std::set<unsigned long> out;
  for (const auto& s : states) out.insert(s.at(slot).as_nat().get_ui());
  return out;
}

ValueTuple triple(const Rational& a, const Rational& b, const Rational& c) { return {real(a), real(b), real(c)}; }

bool contains(const ResultSet& set, const ValueTuple& v) {
  return std::any_of(set.values.begin(), set.values.end(), [&](const ValueTuple& w) { return identical(w, v); });
}

}  // namespace

TEST_SUITE("interp") {
  TEST_CASE("eval_term: choose under enumeration") {
    Fixture f = fixture("algebra N\nfunc f in x: nat out z: nat begin z := choose w : w = 3 end");
    Machine m(*f.prog.algebra, ChoiceStrategy::enumerate(10));
    Fuel fuel(100000);
    OutcomeSet o = m.eval_term(*f.body()->rhs[0], f.state({nat(0)}), fuel);
    REQUIRE(o.values.size() == 1);
    CHECK(o.values[0].as_nat() == 3);
    CHECK_FALSE(o.maybe_divergent);
  }

  TEST_CASE("eval_term: choose over false is only divergence") {
    Fixture f = fixture("algebra N\nfunc f in x: nat out z: nat begin z := choose w : false end");
    for (const ChoiceStrategy& s : {ChoiceStrategy::enumerate(10), ChoiceStrategy::dovetail(), ChoiceStrategy::oracle(7)}) {
      Machine m(*f.prog.algebra, s);
      Fuel fuel(2000);
      OutcomeSet o = m.eval_term(*f.body()->rhs[0], f.state({nat(0)}), fuel);
      CHECK(o.empty());
      CHECK(o.maybe_divergent);
    }
  }

  TEST_CASE("eval_term: conditional") {
    Fixture f = fixture("algebra N\nfunc f in x: nat out z: nat begin z := if(true, 1, 2) end");
    Machine m(*f.prog.algebra, ChoiceStrategy::dovetail());
    Fuel fuel(100);
    OutcomeSet o = m.eval_term(*f.body()->rhs[0], f.state({nat(0)}), fuel);
    REQUIRE(o.singleton());
    CHECK(o.values[0].as_nat() == 1);
  }

  TEST_CASE("eval_atomic: div, assignment and concurrent swap") {
    Fixture f = fixture(
        "algebra N\nfunc f in a: nat out x: nat aux y: nat begin div; x := 1 + 1; y := 5; x, y := y, x end");
    Machine m(*f.prog.algebra, ChoiceStrategy::dovetail());
    Fuel fuel(1000);
    State s = f.state({nat(0)});
    StmtPtr b = f.body();  // div; (x := 2; (y := 5; swap))

    StateSet d = m.eval_atomic(*b->first, s, fuel);
    CHECK(d.empty());
    CHECK(d.maybe_divergent);

    StateSet x2 = m.eval_atomic(*b->second->first, s, fuel);
    REQUIRE(x2.singleton());
    CHECK(x2.values[0][1].as_nat() == 2);

    State s2 = x2.values[0];
    s2 = m.eval_atomic(*b->second->second->first, s2, fuel).values.at(0);
    StateSet sw = m.eval_atomic(*b->second->second->second, s2, fuel);
    REQUIRE(sw.singleton());
    CHECK(sw.values[0][1].as_nat() == 5);
    CHECK(sw.values[0][2].as_nat() == 2);
  }

  TEST_CASE("first") {
    Fixture f = fixture("algebra N\nfunc f in a: nat out x: nat begin x := 1; while true do skip od end");
    StmtPtr b = f.body();
    CHECK(equal(*first(b), *b->first));
    CHECK(first(b->second)->kind == Stmt::Kind::Skip);
    CHECK(first(Stmt::skip())->kind == Stmt::Kind::Skip);
    CHECK(first(Stmt::seq(Stmt::div(), Stmt::skip()))->kind == Stmt::Kind::Div);
  }

  TEST_CASE("rest") {
    Fixture f = fixture(
        "algebra RN\nfunc f in r: real out x: nat begin while true do skip od; "
        "if r < r then x := 1 else x := 2 fi end");
    Machine m(*f.prog.algebra, ChoiceStrategy::enumerate());
    State s = f.state({real(1)});
    Fuel fuel(10000);

    StmtPtr loop = f.body()->first;
    StmtSet r1 = m.rest(loop, s, fuel);
    REQUIRE(r1.values.size() == 1);
    CHECK(equal(*r1.values[0], *Stmt::seq(loop->first, loop)));

    StmtSet r2 = m.rest(f.body()->second, s, fuel);
    REQUIRE(r2.values.size() == 1);
    CHECK(r2.values[0]->kind == Stmt::Kind::Div);

    StmtSet r3 = m.rest(Stmt::skip(), s, fuel);
    REQUIRE(r3.values.size() == 1);
    CHECK(r3.values[0]->kind == Stmt::Kind::Skip);
  }

  TEST_CASE("comp_step") {
    Fixture f = fixture("algebra N\nfunc f in a: nat out x: nat begin x := 0; while true do skip od end");
    Machine m(*f.prog.algebra, ChoiceStrategy::dovetail());
    Fuel fuel(1000);
    State s = f.state({nat(4)});
    s[1] = nat(9);

    StateSet c1 = m.comp_step(f.body(), s, fuel);
    REQUIRE(c1.singleton());
    CHECK(c1.values[0][1].as_nat() == 0);

    StateSet c2 = m.comp_step(Stmt::seq(Stmt::div(), f.body()), s, fuel);
    CHECK(c2.empty());
    CHECK(c2.maybe_divergent);

    StateSet c3 = m.comp_step(f.body()->second, s, fuel);
    REQUIRE(c3.singleton());
    CHECK(identical(c3.values[0], s));
  }

  TEST_CASE("comp_tree_stage") {
    Fixture f = fixture(
        "algebra N\nfunc f in a: nat out z: nat begin while true do skip od; z := choose w : w < 2 end");
    Machine m(*f.prog.algebra, ChoiceStrategy::enumerate(5));
    State s = f.state({nat(0)});
    Fuel fuel(100000);

    CompTree t1 = m.comp_tree_stage(Stmt::skip(), s, 1, fuel);
    REQUIRE(t1.leaves().size() == 1);
    CHECK(identical(t1.leaves()[0], s));

    for (unsigned n : {1u, 5u, 20u}) {
      CompTree t = m.comp_tree_stage(f.body()->first, s, n, fuel);
      CHECK(t.leaves().empty());
      CHECK_FALSE(t.has_div_leaf());
      for (const auto& node : t.nodes) CHECK(node.children.size() <= 1);
      CHECK(t.frontier() == 1);
    }

    CompTree tz = m.comp_tree_stage(f.body()->second, s, 2, fuel);
    CHECK(nat_slots(tz.leaves(), 1) == std::set<unsigned long>{0, 1});
  }

  TEST_CASE("eval_stmt") {
    Fixture f = fixture(
        "algebra RN\nfunc f in a: nat out x: nat begin x := 1; x := x + 1; while true do skip od; "
        "if 0 < 1 then x := 1 else div fi end");
    Machine m(*f.prog.algebra, ChoiceStrategy::dovetail());
    State s = f.state({nat(0)});
    Fuel fuel(10000);

    StmtPtr b = f.body();
    StateSet two = m.eval_stmt(Stmt::seq(b->first, b->second->first), s, fuel);
    REQUIRE(two.singleton());
    CHECK(two.values[0][1].as_nat() == 2);

    Fuel small(2000);
    StateSet loop = m.eval_stmt(b->second->second->first, s, small);
    CHECK(loop.empty());
    CHECK(loop.maybe_divergent);

    StateSet cond = m.eval_stmt(b->second->second->second, s, fuel);
    REQUIRE(cond.singleton());
    CHECK(cond.values[0][1].as_nat() == 1);
  }

  TEST_CASE("eval_proc") {
    Procedure id = parse("algebra RN\nfunc id in a: real out b: real begin b := a end");
    ResultSet r = run_procedure(*shared_builtin("RN"), id, {real(Rational(5, 7))}, ChoiceStrategy::dovetail(), 1000);
    REQUIRE(r.singleton());
    CHECK(r.values[0][0].as_real().exact() == Rational(5, 7));

    Program pivot = program_entry("pivot").parse();
    const Procedure& p = pivot.procedures.front();
    ResultSet one = run_procedure(*pivot.algebra, p, triple(0, Rational(7, 2), 0), ChoiceStrategy::enumerate(), 100000);
    CHECK(nat_outputs(one) == std::set<unsigned long>{2});
    CHECK_FALSE(one.maybe_divergent);

    ResultSet none = run_procedure(*pivot.algebra, p, triple(0, 0, 0), ChoiceStrategy::enumerate(), 20000);
    CHECK(none.empty());
    CHECK(none.maybe_divergent);
  }

  TEST_CASE("is_deterministic_on") {
    Program pivot = program_entry("pivot").parse();
    DeterminismReport r = is_deterministic_on(*pivot.algebra, pivot.procedures.front(), {triple(1, 1, 0)});
    CHECK_FALSE(r.all_singleton);
    CHECK(nat_outputs(r.samples.at(0).outcome) == std::set<unsigned long>{1, 2});

    Procedure c = parse("algebra RN\nfunc c in a: real out b: real begin b := 1 end");
    DeterminismReport rc = is_deterministic_on(*shared_builtin("RN"), c, {{real(0)}, {real(3)}});
    CHECK(rc.all_singleton);
  }

  TEST_CASE("choose_eliminate") {
    Procedure five = parse("algebra N\nfunc f in a: nat out z: nat begin z := choose w : w = 5 end");
    Procedure loop = choose_eliminate(five);
    CHECK_FALSE(contains_choose(*loop.body));
    ResultSet r = run_procedure(*shared_builtin("N"), loop, {nat(0)}, ChoiceStrategy::dovetail(), 10000);
    REQUIRE(r.singleton());
    CHECK(r.values[0][0].as_nat() == 5);

    Program ld = program_entry("least_divisor").parse();
    const Procedure& p = ld.procedures.front();
    Procedure q = choose_eliminate(p, *ld.algebra);
    for (unsigned n = 0; n <= 40; ++n) {
      ResultSet a = run_procedure(*ld.algebra, p, {nat(n)}, ChoiceStrategy::dovetail(), 1'000'000);
      ResultSet b = run_procedure(*ld.algebra, q, {nat(n)}, ChoiceStrategy::dovetail(), 1'000'000);
      REQUIRE(a.singleton());
      REQUIRE(b.singleton());
      CHECK(identical(a.values[0], b.values[0]));
    }

    Program pivot = program_entry("pivot").parse();
    CHECK_THROWS_AS(choose_eliminate(pivot.procedures.front(), *pivot.algebra), EliminationError);
  }

  TEST_CASE("strategy soundness on sampled inputs") {
    Program pivot = program_entry("pivot").parse();
    const Procedure& p = pivot.procedures.front();
    std::vector<ValueTuple> samples = {triple(1, 1, 0), triple(0, Rational(7, 2), -1), triple(1, 0, 0),
                                       triple(-2, 3, 5)};
    for (const ValueTuple& x : samples) {
      ResultSet all = run_procedure(*pivot.algebra, p, x, ChoiceStrategy::enumerate(), 200000);
      std::vector<ChoiceStrategy> strategies = {ChoiceStrategy::dovetail()};
      for (std::uint64_t seed = 0; seed < 8; ++seed) {
        strategies.push_back(ChoiceStrategy::dovetail(seed));
        strategies.push_back(ChoiceStrategy::oracle(seed));
      }
      for (const ChoiceStrategy& s : strategies) {
        ResultSet one = run_procedure(*pivot.algebra, p, x, s, 200000);
        for (const auto& v : one.values) CHECK_MESSAGE(contains(all, v), s.to_string());
      }
    }

    Program near = program_entry("choose_near").parse();
    const Procedure& c = near.procedures.front();
    ValueTuple x = {real(Rational(1, 3)), nat(1)};
    ResultSet all = run_procedure(*near.algebra, c, x, ChoiceStrategy::enumerate(), 200000);
    REQUIRE_FALSE(all.empty());
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      for (const ChoiceStrategy& s : {ChoiceStrategy::dovetail(seed), ChoiceStrategy::oracle(seed)}) {
        ResultSet one = run_procedure(*near.algebra, c, x, s, 200000);
        for (const auto& v : one.values) CHECK(contains(all, v));
      }
    }
  }

  TEST_CASE("stage n is a prefix of stage n + 1") {
    Program pivot = program_entry("pivot").parse();
    const Procedure& p = pivot.procedures.front();
    Machine m(*pivot.algebra, ChoiceStrategy::enumerate(6));
    State s = m.initial_state(p, triple(1, 0, 2));
    Fuel fuel(1'000'000);
    CompTree prev = m.comp_tree_stage(p.body, s, 0, fuel);
    for (unsigned n = 1; n <= 4; ++n) {
      CompTree next = m.comp_tree_stage(p.body, s, n, fuel);
      CHECK(prev.is_prefix_of(next));
      prev = std::move(next);
    }
    CHECK(nat_slots(prev.leaves(), 3) == std::set<unsigned long>{1, 3});
  }

  TEST_CASE("initial values of out and aux variables do not matter") {
    Program exp = program_entry("exp_approx").parse();
    const Procedure& p = exp.procedures.front();
    ValueTuple x = {nat(2), Value::interval(Real(Rational(1, 2)))};
    Machine m(*exp.algebra, ChoiceStrategy::dovetail());
    Fuel f1(1'000'000);
    ResultSet base = m.eval_proc(p, x, f1);
    REQUIRE(base.singleton());

    State perturbed = m.initial_state(p, x);
    perturbed[2] = real(Rational(-17, 3));  // s
    perturbed[3] = real(99);                // y
    perturbed[4] = nat(12345);              // k
    Fuel f2(1'000'000);
    ResultSet other = m.eval_proc_from(p, x, perturbed, f2);
    REQUIRE(other.singleton());
    CHECK(identical(base.values[0], other.values[0]));
  }

  TEST_CASE("leaves found with less fuel are found with more") {
    Program pivot = program_entry("pivot").parse();
    const Procedure& p = pivot.procedures.front();
    Machine m(*pivot.algebra, ChoiceStrategy::enumerate(8));
    State s = m.initial_state(p, triple(1, 0, 3));
    std::vector<State> prev;
    for (std::uint64_t k : {50, 200, 1000, 5000, 50000}) {
      Fuel fuel(k);
      StateSet got = m.eval_stmt(p.body, s, fuel);
      for (const State& old : prev)
        CHECK(std::any_of(got.values.begin(), got.values.end(), [&](const State& st) { return identical(st, old); }));
      prev = got.values;
    }
    CHECK(prev.size() == 2);
  }

  TEST_CASE("exp_approx is continuous at sampled points") {
    Program exp = program_entry("exp_approx").parse();
    const Procedure& p = exp.procedures.front();
    const Rational a(1, 2);
    const unsigned n = 2, m = 8;
    ResultSet at = run_procedure(*exp.algebra, p, {nat(n), Value::interval(Real(a))}, ChoiceStrategy::dovetail(), 1'000'000);
    REQUIRE(at.singleton());
    Rational b = at.values[0][0].as_real().exact();
    Rational eps(1, 1u << m);

    bool found = false;
    for (unsigned j = 1; j <= 20 && !found; ++j) {
      Rational delta(1, 1ul << j);
      bool all = true;
      for (int i = -5; i <= 5 && all; ++i) {
        if (i == 0) continue;
        Rational x = a + delta * Rational(i, 6);
        ResultSet r = run_procedure(*exp.algebra, p, {nat(n), Value::interval(Real(x))}, ChoiceStrategy::dovetail(), 1'000'000);
        all = r.singleton() && abs(r.values[0][0].as_real().exact() - b) < eps;
      }
      found = all;
    }
    CHECK(found);
  }

  TEST_CASE("pivot is continuous at sampled points") {
    Program pivot = program_entry("pivot").parse();
    const Procedure& p = pivot.procedures.front();
    ResultSet at = run_procedure(*pivot.algebra, p, triple(1, 0, -1), ChoiceStrategy::enumerate(4), 200000);
    REQUIRE_FALSE(at.empty());
    for (const auto& b : at.values) {
      bool found = false;
      for (unsigned j = 1; j <= 20 && !found; ++j) {
        Rational delta(1, 1ul << j);
        bool all = true;
        for (int i = 1; i <= 10 && all; ++i) {
          Rational h = delta * Rational(i % 2 ? i : -i, 11);
          ValueTuple x = triple(1 + h, h, -1 - h);
          ResultSet r = run_procedure(*pivot.algebra, p, x, ChoiceStrategy::enumerate(4), 200000);
          all = contains(r, b);
        }
        found = all;
      }
      CHECK(found);
    }
  }

  TEST_CASE("dovetail runs are reproducible and seeded orders are bijections") {
    Program near = program_entry("choose_near").parse();
    const Procedure& c = near.procedures.front();
    ValueTuple x = {real(Rational(2, 7)), nat(6)};
    for (std::uint64_t seed : {0ull, 3ull, 41ull}) {
      ResultSet r1 = run_procedure(*near.algebra, c, x, ChoiceStrategy::dovetail(seed), 1'000'000);
      ResultSet r2 = run_procedure(*near.algebra, c, x, ChoiceStrategy::dovetail(seed), 1'000'000);
      REQUIRE(r1.singleton());
      REQUIRE(r2.singleton());
      CHECK(identical(r1.values[0], r2.values[0]));
    }

    DovetailOrder order(std::uint64_t{5}, 1024, 32);
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 5000; ++k) CHECK(seen.insert(order(k)).second);
    for (std::uint64_t v = 0; v < 1000; ++v) CHECK(seen.count(v) == 1);

    DovetailOrder plain;
    for (std::uint64_t k = 0; k < 100; ++k) CHECK(plain(k) == k);
  }

  TEST_CASE("dovetail_search finds a witness past stuck candidates") {
    // Candidates below 10 never decide; 10 is the first that succeeds.
    auto probe = [](const Natural& z, Fuel& fuel) -> Verdict<bool> {
      if (z < 10) {
        while (fuel.consume()) {
        }
        return FuelExhausted{};
      }
      return z == 12 || z == 10;
    };
    Fuel fuel(100000);
    Verdict<Natural> v = dovetail_search(probe, fuel);
    REQUIRE(v.converged());
    CHECK(v.value() == 10);
  }
}

#include <doctest.h>

#include <algorithm>

#include "whilecc/algebra.hpp"
#include "whilecc/reals.hpp"
#include "whilecc/signature.hpp"

using namespace whilecc;

namespace {

// The ring of reals, before any boolean structure is added.
Signature ring_of_reals() {
  Signature sig;
  const Sort r = Sort::real();
  sig.add_sort(r, {"zero_real", {}});
  sig.add_symbol({"zero_real", "zero", {}, r});
  sig.add_symbol({"one_real", "one", {}, r});
  sig.add_symbol({"add_real", "add", {r, r}, r});
  sig.add_symbol({"mul_real", "mul", {r, r}, r});
  sig.add_symbol({"neg_real", "neg", {r}, r});
  sig.declare_equality(r);
  sig.declare_order(r);
  return sig;
}

}  // namespace

TEST_SUITE("signature") {
  TEST_CASE("standardise adds booleans, conditionals and declared comparisons") {
    Signature s = standardise(ring_of_reals());
    CHECK(s.standard());
    CHECK(s.has_sort(Sort::boolean()));
    for (const char* name : {"if_real", "eq_real", "less_real", "and", "or", "not", "true", "false"})
      CHECK_MESSAGE(s.find(name) != nullptr, std::string(name));
    CHECK(s.find("if_bool") == nullptr);  // conditionals on sorts other than bool
    CHECK(s.at("if_real").conditional);
    CHECK(s.validate().empty());
  }

  TEST_CASE("standardise of a standard signature is rejected") {
    Signature s = standardise(ring_of_reals());
    CHECK_THROWS_AS(standardise(s), SignatureError);
  }

  TEST_CASE("standardise of a bare sort gives only boolean operations and if_s") {
    Signature u;
    u.add_sort(Sort::user("s"), {"c", {}});
    u.add_symbol({"c", "c", {}, Sort::user("s")});
    Signature s = standardise(u);
    std::vector<std::string> names;
    for (const auto& [n, f] : s.symbols()) names.push_back(n);
    std::vector<std::string> want = {"and", "c", "false", "if_s", "not", "or", "true"};
    CHECK(names == want);
  }

  TEST_CASE("n_standardise adds the naturals") {
    Signature s = n_standardise(standardise(ring_of_reals()));
    CHECK(s.n_standard());
    for (const char* name : {"zero_nat", "S", "eq_nat", "less_nat", "if_nat"}) CHECK(s.find(name) != nullptr);
    CHECK_THROWS_AS(n_standardise(s), SignatureError);
  }

  TEST_CASE("n_standardise of the booleans has two sorts") {
    Signature s = n_standardise(standardise(Signature{}));
    CHECK(s.sorts().size() == 2);
  }

  TEST_CASE("star_signature adds array sorts with Lgth: s* -> nat") {
    Signature s = star_signature(n_standardise(standardise(ring_of_reals())));
    CHECK(s.has_sort(Sort::real().star()));
    for (const auto& sort : {Sort::boolean(), Sort::nat(), Sort::real()}) {
      const FuncSymbol& lg = s.at(sym::lgth(sort));
      REQUIRE(lg.args.size() == 1);
      CHECK(lg.args[0] == sort.star());
      CHECK(lg.result == Sort::nat());
      CHECK(s.at(sym::ap(sort)).result == sort);
    }
    CHECK_THROWS_AS(star_signature(s), SignatureError);
  }

  TEST_CASE("default terms") {
    Signature s = star_signature(n_standardise(standardise(ring_of_reals())));
    CHECK(default_term(s, Sort::boolean()).to_string() == "false");
    CHECK(default_term(s, Sort::nat()).to_string() == "zero_nat");
    CHECK(default_term(s, Sort::real().star()).symbol == sym::null(Sort::real()));
  }
}

TEST_SUITE("algebra") {
  TEST_CASE("boolean operations") {
    auto B = builtin_B();
    Fuel f(10);
    auto tt = Value::boolean(true), ff = Value::boolean(false);
    CHECK(B->apply("and", {tt, ff}, f).value().as_bool() == false);
    auto inner = B->apply("not", {tt}, f).value();
    CHECK(B->apply("not", {inner}, f).value().as_bool() == true);
    CHECK(B->apply("or", {ff, ff}, f).value().as_bool() == false);
  }

  TEST_CASE("naturals") {
    auto N = builtin_N();
    Fuel f(10);
    CHECK(N->apply("eq_nat", {Value::nat(3), Value::nat(3)}, f).value().as_bool());
    CHECK(N->apply("less_nat", {Value::nat(2), Value::nat(7)}, f).value().as_bool());
    CHECK(N->apply("if_nat", {Value::boolean(true), Value::nat(4), Value::nat(9)}, f).value().as_nat() == 4);
    CHECK(N->apply("S", {Value::nat(41)}, f).value().as_nat() == 42);
    CHECK(N->total());
  }

  TEST_CASE("partial real comparisons") {
    auto R = builtin_R();
    const auto one = Value::real(Rational(1)), two = Value::real(Rational(2));
    Fuel f(100);
    auto lt = R->apply("less_real", {one, two}, f);
    REQUIRE(lt.converged());
    CHECK(lt.value().as_bool());
    for (std::uint64_t budget : {1, 10, 1000, 100000}) {
      Fuel g(budget);
      CHECK(R->apply("eq_real", {one, one}, g).fuel_exhausted());
    }
    Fuel h(100);
    CHECK(R->apply("inv_real", {Value::real(Rational(0))}, h).proven_divergent());
    Fuel k(100);
    CHECK(R->apply("add_real", {Value::real(Rational(1, 2)), Value::real(Rational(1, 3))}, k).value().as_real().exact() ==
          Rational(5, 6));
  }

  TEST_CASE("less_real on an e-code against itself never converges") {
    auto R = builtin_R();
    Value x = Value::real(Real(sqrt_code(2)));
    Fuel f(5000);
    CHECK(R->apply("less_real", {x, x}, f).fuel_exhausted());
  }

  TEST_CASE("interval algebra") {
    auto I = builtin_interval();
    Fuel f(10);
    auto v = I->apply("i_I", {Value::interval(Real(Rational(1, 2)))}, f);
    CHECK(v.value().as_real().exact() == Rational(1, 2));
  }

  TEST_CASE("arrays") {
    auto A = shared_builtin("RN*");
    Fuel f(100);
    const Sort r = Sort::real();
    auto null = A->apply(sym::null(r), {}, f).value();
    CHECK(A->apply(sym::lgth(r), {null}, f).value().as_nat() == 0);
    auto three = A->apply(sym::newlength(r), {null, Value::nat(3)}, f).value();
    auto written = A->apply(sym::update(r), {three, Value::nat(1), Value::real(Rational(7))}, f).value();
    CHECK(A->apply(sym::ap(r), {written, Value::nat(1)}, f).value().as_real().exact() == 7);
    auto a12 = Value::array(Sort::nat(), {Value::nat(1), Value::nat(2)});
    auto a123 = Value::array(Sort::nat(), {Value::nat(1), Value::nat(2), Value::nat(3)});
    CHECK(A->metric(Sort::nat().star(), a12, a123, 10) == 1);
  }

  TEST_CASE("product metric") {
    auto R = shared_builtin("RN");
    const std::vector<Sort> rr = {Sort::real(), Sort::real()};
    ValueTuple o = {Value::real(Rational(0)), Value::real(Rational(0))};
    ValueTuple p = {Value::real(Rational(3)), Value::real(Rational(4))};
    CHECK(abs(Rational(product_metric(*R, rr, o, p, 20) - 4)) <= pow2(-20));
    CHECK(product_metric(*R, rr, p, p, 20) <= pow2(-20));
    const std::vector<Sort> mixed = {Sort::real(), Sort::nat()};
    ValueTuple x = {Value::real(Rational(1, 8)), Value::nat(3)};
    ValueTuple y = {Value::real(Rational(1, 8)), Value::nat(4)};
    CHECK(product_metric(*R, mixed, x, y, 20) == 1);
  }

  TEST_CASE("fuel monotonicity of apply") {
    auto R = shared_builtin("RN");
    std::vector<std::vector<Value>> args = {
        {Value::real(Rational(1)), Value::real(Rational(2))},
        {Value::real(Rational(1, 3)), Value::real(Real(sqrt_code(2)))},
        {Value::real(Rational(2)), Value::real(Rational(2))},
    };
    for (const char* op : {"less_real", "eq_real"})
      for (const auto& a : args) {
        std::optional<std::string> first;
        for (std::uint64_t k : {1, 2, 4, 16, 256, 4096}) {
          Fuel f(k);
          auto v = R->apply(op, a, f);
          if (v.fuel_exhausted()) {
            CHECK_FALSE(first.has_value());
            continue;
          }
          std::string now = std::string(v.kind_name()) + (v.converged() ? v.value().to_string() : "");
          if (first) CHECK(*first == now);
          first = now;
        }
      }
  }

  TEST_CASE("total algebras never diverge") {
    auto N = builtin_N();
    Fuel f(1000);
    for (unsigned a = 0; a < 5; ++a)
      for (unsigned b = 0; b < 5; ++b)
        for (const char* op : {"eq_nat", "less_nat"}) CHECK(N->apply(op, {Value::nat(a), Value::nat(b)}, f).converged());
  }
}

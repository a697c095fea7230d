#include <doctest.h>

#include "whilecc/real_arith.hpp"
#include "whilecc/reals.hpp"
#include "whilecc/programs.hpp"

using namespace whilecc;

namespace {

// sqrt(2) to 60 decimal places.
const Rational kSqrt2 = parse_rational("1.414213562373095048801688724209698078569671875376948073176679");

Rational e_reference() { return oracles::exp_value(1, 213).center; }

}  // namespace

TEST_SUITE("reals") {
  TEST_CASE("rational literals are decimal") {
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("-0.08") == Rational(-2, 25));
    CHECK(parse_rational("010") == 10);
    CHECK(parse_rational("011/09") == Rational(11, 9));
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  }

  TEST_CASE("pairing round trip") {
    for (unsigned long z = 0; z < 2000; ++z) {
      auto [a, b] = unpair(Natural(z));
      CHECK(pair(a, b) == z);
    }
    Natural big("123456789012345678901234567890");
    auto [a, b] = unpair(big);
    CHECK(pair(a, b) == big);
  }

  TEST_CASE("alpha_rat decodes code 0 to 0 and is onto a sample of rationals") {
    Enumeration a = alpha_rat();
    CHECK(a(Sort::real(), 0).as_real().exact() == 0);
    for (Rational r : {Rational(0), Rational(1), Rational(-1), Rational(3, 7), Rational(-22, 5), Rational(355, 113)}) {
      Natural k = rat_index(r);
      CHECK(a(Sort::real(), k).as_real().exact() == r);
      for (Natural j = 0; j < k; ++j) CHECK(rat_decode(j) != r);  // least index
    }
    for (unsigned long k = 0; k < 500; ++k) CHECK(a.contains(Sort::real(), k));
  }

  TEST_CASE("c_to_e: constant sequence with identity modulus") {
    CCode c{"const", [](const Natural&) { return Rational(3, 4); }, [](unsigned n) { return Natural(n); }};
    ECodePtr e = c_to_e(c);
    for (unsigned n = 0; n < 10; ++n) CHECK(e->at(n) == Rational(3, 4));
  }

  TEST_CASE("c_to_e: 1/(k+1) with modulus 2^n is a fast code for 0") {
    CCode c{"harmonic", [](const Natural& k) { return Rational(Natural(1), k + 1); },
            [](unsigned n) { return Natural(1) << n; }};
    ECodePtr e = c_to_e(c);
    CHECK(validate_prefix(*e, 12, 14).ok);
    for (unsigned n = 0; n < 12; ++n) CHECK(abs(e->at(n)) < pow2(-static_cast<long>(n)));
  }

  TEST_CASE("c_to_e: a modulus that is too small is rejected") {
    CCode c{"bad", [](const Natural& k) { return Rational(Natural(1), k + 1); }, [](unsigned n) { return Natural(n); }};
    CHECK_THROWS_AS(c_to_e(c), InvalidCode);
  }

  TEST_CASE("e-code evaluation") {
    ECodePtr third = ECode::constant(Rational(1, 3));
    for (unsigned n : {0u, 5u, 40u}) CHECK(ecode_eval(*third, n) == Rational(1, 3));
    ECodePtr s = CodeRegistry::instance().parse("sqrt2");
    CHECK(abs(Rational(ecode_eval(*s, 10) - kSqrt2)) < pow2(-9));
    ECodePtr e = CodeRegistry::instance().parse("e");
    for (unsigned n = 0; n <= 30; ++n) CHECK(abs(Rational(ecode_eval(*e, n) - e_reference())) < pow2(1 - static_cast<long>(n)));
  }

  TEST_CASE("fast Cauchy prefix holds for arithmetic on codes") {
    ECodePtr s = sqrt_code(2), t = sqrt_code(3), e = exp_code(1);
    for (ECodePtr c : {ECode::sum(s, t), ECode::product(s, e), ECode::reciprocal(t), ECode::absolute(ECode::negate(e)),
                       ECode::product(ECode::sum(s, ECode::negate(s)), t)})
      CHECK_MESSAGE(validate_prefix(*c).ok, c->describe());
  }

  TEST_CASE("const_code carries the alpha index") {
    Enumeration a = alpha_rat();
    for (unsigned long k : {0ul, 7ul, 31ul, 1000ul}) {
      ECodePtr c = const_code(a, k);
      for (unsigned n : {0u, 3u, 17u}) CHECK(c->index(n) == k);
      CHECK(c->at(4) == rat_decode(k));
      CHECK(validate_prefix(*c).ok);
    }
    CHECK(const_code(a, rat_index(Rational(7, 2)))->at(20) == Rational(7, 2));
  }

  TEST_CASE("diagonal codes") {
    ECodePtr q = ECode::constant(Rational(5, 7));
    ECodePtr d = diagonal_code([q](unsigned) { return q; });
    for (unsigned n = 0; n < 10; ++n) CHECK(d->at(n) == Rational(5, 7));

    // Levels are Taylor partial sums of e with 2^-n accuracy.
    ECodePtr de = diagonal_code([](unsigned n) { return ECode::constant(oracles::exp_value(1, n + 2).center); });
    CHECK(validate_prefix(*de).ok);
    for (unsigned n = 0; n < 14; ++n) CHECK(abs(Rational(de->at(n) - e_reference())) < pow2(-static_cast<long>(n)));

    ECodePtr ds = diagonal_code([](unsigned n) { return ECode::constant(sqrt_code(2)->at(n + 1)); });
    for (unsigned n = 0; n < 14; ++n) CHECK(abs(Rational(ds->at(n) - kSqrt2)) < pow2(-static_cast<long>(n)));
  }

  TEST_CASE("computable closure over a code store") {
    auto store = std::make_shared<CodeStore>();
    Enumeration a = alpha_rat();
    Enumeration abar = computable_closure(a, store);
    Natural k = rat_index(Rational(-3, 8));
    Natural i = store->add(const_code(a, k));
    for (unsigned n : {0u, 9u}) CHECK(abar(Sort::real(), i).as_real().approx(n) == Rational(-3, 8));

    // Diagonal of closure codes is again a closure code.
    Natural s = store->add(sqrt_code(2));
    ECodePtr diag = diagonal_code([&](unsigned) { return abar(Sort::real(), s).as_real().code(); });
    Natural j = store->add(diag);
    CHECK(abar.contains(Sort::real(), j));

    ECodePtr broken = ECode::sequence("broken", [](unsigned n) { return Rational(n % 2); });
    Natural b = store->add(broken);
    CHECK_FALSE(abar.contains(Sort::real(), b));
    CHECK_FALSE(validate_prefix(*broken).ok);
  }

  TEST_CASE("canonical enumeration from the generators 0 and 1") {
    auto R = shared_builtin("R");
    const std::map<Sort, std::vector<std::string>> gens = {{Sort::real(), {"zero_real", "one_real"}}};
    Enumeration c = canonical_enum(R->signature(), R, gens);
    TermCoding coding(R->signature(), gens);

    ClosedTerm two{"add_real", {{"one_real", {}}, {"one_real", {}}}};
    Natural k = coding.index(Sort::real(), two);
    CHECK(coding.term(Sort::real(), k).to_string() == two.to_string());
    CHECK(c(Sort::real(), k).as_real().exact() == 2);

    ClosedTerm bad{"inv_real", {{"zero_real", {}}}};
    CHECK_FALSE(c.contains(Sort::real(), coding.index(Sort::real(), bad)));

    // Every value reached on a prefix is rational, and small rationals appear.
    std::set<Rational> seen;
    for (unsigned long j = 0; j < 3000; ++j) {
      try {
        if (c.contains(Sort::real(), j)) seen.insert(c(Sort::real(), j).as_real().exact());
      } catch (const PendingEvaluation&) {
      }
    }
    for (Rational r : {Rational(0), Rational(1), Rational(-1), Rational(2), Rational(1, 2)}) CHECK(seen.count(r));
  }

  TEST_CASE("intervals") {
    CHECK(real_arith::make_interval(Real(Rational(1, 2))).has_value());
    CHECK_FALSE(real_arith::make_interval(Real(Rational(2))).has_value());
    ECodePtr third = ECode::sequence("third", [](unsigned n) { return round_to_grid(Rational(1, 3), n + 2); });
    CHECK(real_arith::make_interval(Real(third)).has_value());
  }
}

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "whilecc/algebra.hpp"
#include "whilecc/ast.hpp"
#include "whilecc/interp.hpp"
#include "whilecc/reals.hpp"

namespace whilecc {

// An abstract function F: A^u -> A_s, usually a basic operation of an algebra.
struct AbstractFn {
  std::string name;
  std::vector<Sort> in;
  Sort out = Sort::real();
  std::function<Verdict<Value>(const ValueTuple&, Fuel&)> fn;

  static AbstractFn of(AlgebraPtr a, const std::string& symbol);
};

// f: Omega^u -> Omega_s on code tuples. Nat and bool codes are the values
// themselves (bool: 0 = ff, 1 = tt).
struct TrackingFn {
  std::string name;
  std::vector<Sort> in;
  Sort out = Sort::real();
  std::function<Verdict<Natural>(const std::vector<Natural>&, Fuel&)> rule;

  Verdict<Natural> operator()(const std::vector<Natural>& k, Fuel& fuel) const { return rule(k, fuel); }
};

struct TrackingReport {
  enum class Status { Pass, Fail, Undecided };
  struct Entry {
    std::vector<Natural> sample;
    Status status = Status::Pass;
    std::string check;  // "square" or "strict"
    std::string detail;
  };
  std::string name;
  std::vector<Entry> entries;
  // Real equality is only ever "not refuted at 2^-20".
  std::string scope = "verified on samples";

  bool passed() const;
  std::size_t failures() const;
  // One "PASS/FAIL <check> <sample> <detail>" line per entry.
  std::vector<std::string> lines() const;
};

// Checks the commuting square F(alpha(k)) = alpha(f(k)) on each sample where F
// converges, and with `strict` that f(k) converging implies F(alpha(k)) does.
// An F evaluation that exhausts `fuel` is reported undecided.
TrackingReport check_tracking(const AbstractFn& F, const TrackingFn& f, const Enumeration& alpha,
                              const std::vector<std::vector<Natural>>& samples, bool strict,
                              std::uint64_t fuel = 100000);

// Maps a value back to some code of it; the inverse direction of alpha.
using Encoder = std::function<Natural(const Sort&, const Value&)>;

// f = encode . F . alpha, which is a strict tracking function whenever every
// F-value on the enumerated subspace is encodable.
TrackingFn lifted_tracking(const AbstractFn& F, const Enumeration& alpha, Encoder encode);

struct EffectivityCert {
  Signature signature;
  std::map<std::string, TrackingFn> trackers;
  std::map<std::string, TrackingReport> reports;
  // Code of the numeral q at a non-nat sort.
  std::function<Natural(const Sort&, const Rational&)> literal;

  std::vector<std::string> uncovered() const;
  bool all_passed() const;
};

// One lifted tracker per symbol of a, each checked (strictly) on tuples drawn
// from `sample_codes`.
EffectivityCert certify(AlgebraPtr a, const Enumeration& alpha, Encoder encode,
                        const std::map<Sort, std::vector<Natural>>& sample_codes, std::size_t max_samples = 24);

class UncoveredSymbol : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carriers are codes: nat and bool as themselves, other sorts as
// Value::code(k). Basic operations are the certified trackers, so running the
// interpreter here runs the representing functions of the semantics.
std::shared_ptr<PartialAlgebra> code_algebra(const Enumeration& alphabar, const EffectivityCert& certs);

// Decodes a code-algebra value through alpha.
Value decode(const Enumeration& alpha, const Sort& s, const Value& code_value);
ValueTuple decode(const Enumeration& alpha, const std::vector<Sort>& sorts, const ValueTuple& codes);

// The rational-code algebra over a rational algebra such as RN or IN: codes
// are alpha_rat indices, trackers are exact rational arithmetic.
struct RationalCodes {
  AlgebraPtr base;
  Enumeration alpha;
  EffectivityCert cert;
  AlgebraPtr algebra;

  Value encode(const Sort& s, const Value& v) const;
};
RationalCodes rational_code_algebra(AlgebraPtr base);

// The closure-code algebra: codes index an append-only store of e-codes and
// alphabar decodes them (computable reals when alpha = alpha_rat).
struct ClosureCodes {
  AlgebraPtr base;
  Enumeration alpha;
  std::shared_ptr<CodeStore> store;
  Enumeration alphabar;
  EffectivityCert cert;
  AlgebraPtr algebra;

  Natural add(ECodePtr e) const { return store->add(std::move(e)); }
  Natural add(const Real& r) const { return store->add(r.code()); }
  // e_con[k] for the alpha-code k, memoized. Single writer, like the store.
  Natural econ(const Natural& k) const;

 private:
  std::shared_ptr<std::map<Natural, Natural>> econ_memo_ = std::make_shared<std::map<Natural, Natural>>();
};
ClosureCodes closure_code_algebra(AlgebraPtr base);

// A strict closure tracker for the single-argument function given on reals.
TrackingFn closure_tracking(const ClosureCodes& c, std::string name,
                            std::function<Verdict<Real>(const Real&, Fuel&)> F);

class LiftAborted : public std::runtime_error {
 public:
  LiftAborted(unsigned level, const std::string& why);
  unsigned level() const { return level_; }

 private:
  unsigned level_;
};

// Diagonal construction: P: nat x u -> s is run on the closure-code algebra at
// each level n to give f_n(e); the result e'' has {e''}(n) = {f_{n+2}(e)}(n+2)
// and is registered in the store.
struct LiftResult {
  Natural index;
  ECodePtr code;
};
LiftResult soundness_lift(const ClosureCodes& c, const Procedure& P, const std::vector<Natural>& e,
                          const ChoiceStrategy& strategy = ChoiceStrategy::dovetail(),
                          std::uint64_t fuel_per_level = 10'000'000);

// Recursive sequence of balls B(alpha(k_i), 2^-l_i) over tuples of the sorts.
struct EffOpenCover {
  enum class Relation { Equal, Superset };
  struct Ball {
    std::vector<Natural> center;  // alpha-codes
    unsigned radius_exp = 0;      // l_i
  };
  std::vector<Sort> sorts;
  std::function<Ball(const Natural&)> ball;
  Relation relation = Relation::Equal;

  // Cycles through a finite list of (center, l) pairs.
  static EffOpenCover finite(std::vector<Sort> sorts, std::vector<Ball> balls, Relation r = Relation::Equal);
  // Unary real cover from rational centers.
  static EffOpenCover rational_balls(const std::vector<std::pair<Rational, unsigned>>& balls,
                                     Relation r = Relation::Equal);
};

struct LUCModulus {
  EffOpenCover cover;
  std::function<Natural(const Natural& i, unsigned n)> lu;
};

// Semi-decides membership of x in the cover: Converged(true) once some ball
// certifies it, FuelExhausted otherwise.
Verdict<bool> effective_open_membership(const EffOpenCover& cover, const Enumeration& alpha, const ValueTuple& x,
                                        Fuel& fuel, const DovetailOrder& order = {});
Verdict<bool> effective_open_membership(const EffOpenCover& cover, const Enumeration& alpha,
                                        const Enumeration& alphabar, const std::vector<Natural>& e, Fuel& fuel);

// f' semi-decides that alphabar(e) lies in the cover before deferring to f.
TrackingFn strictify_tracking(const TrackingFn& f, const EffOpenCover& cover, const Enumeration& alpha,
                              const Enumeration& alphabar);

// Sampled check of the modulus: pairs within 2^-LU(i,n) inside ball i map
// within 2^-n. Points outside every ball are skipped.
TrackingReport check_modulus(const AbstractFn& F, const LUCModulus& m, const Enumeration& alpha,
                             const std::vector<ValueTuple>& points, unsigned max_n, std::uint64_t fuel = 100000);

// MC_F(x, n) = max(d0, LU_F(i, n)) with i and d0 found by dovetailed search.
Verdict<Natural> adequacy_mc(const LUCModulus& m, const Enumeration& alpha, const ValueTuple& x, unsigned n,
                             const ChoiceStrategy& strategy, Fuel& fuel);

// G_n(x): M = MC_F(x, n+1); choose k with d(alpha(k), x) < 2^-M and
// f(e_con[k]) defined; return alpha({f(e_con[k])}(n+1)).
Verdict<Value> adequacy_g(const TrackingFn& f, const LUCModulus& m, const ClosureCodes& c, const ValueTuple& x,
                          unsigned n, const ChoiceStrategy& strategy, Fuel& fuel);

// Goedel number of a procedure: its printed text folded byte by byte with the
// pairing function.
Natural godel_number(const Procedure& p);

}  // namespace whilecc

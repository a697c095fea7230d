// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "whilecc/lang.hpp"
#include "whilecc/programs.hpp"
#include "whilecc/real_arith.hpp"
#include "whilecc/tracking.hpp"

using namespace whilecc;

namespace {

// Runtime limits in seconds.
constexpr double kLimitExp = 5, kLimitPivot = 1, kLimitBisect = 60, kLimitElim = 10, kLimitSquare = 5, kLimitLift = 10,
                 kLimitApproximant = 10;
// Bits of the e^x oracle: 64 decimal digits.
constexpr unsigned kOracleBits = 213;
// distance() is asked for within 2^-kDistanceBits of the true distance.
constexpr unsigned kDistanceBits = 60;
constexpr std::uint64_t kFuel = 1'000'000;
constexpr std::uint64_t kDivergenceFuel = 100'000;

struct Outcome {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (notes.size() < 6) notes.push_back(what);
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit;  // 0: no limit
  std::function<Outcome(std::string&)> run;
};

Value real(const Rational& q) { return Value::real(Real(q)); }
Value nat(unsigned long n) { return Value::nat(Natural(n)); }
Rational two_to(long e) { return pow2(e); }

Program program(const std::string& name, const char* algebra = nullptr) {
  const StdlibEntry& e = program_entry(name);
  if (!algebra) return e.parse();
  std::string src = e.source;
  std::size_t at = src.find("algebra ");
  std::size_t end = src.find('\n', at);
  src.replace(at, end - at, std::string("algebra ") + algebra);
  return parse_program(src);
}

// ------------------------------------------------------------ 1

// sum_{i=0}^{2^(n+1)} x^i / i!, summed term by term.
Rational direct_partial_sum(const Rational& x, unsigned n) {
  const unsigned long top = 1ul << (n + 1);
  Rational term = 1, sum = 1;
  for (unsigned long i = 1; i <= top; ++i) {
    term = term * x / Rational(static_cast<long>(i));
    sum += term;
  }
  return sum;
}

Outcome exp_approximation(std::string& summary) {
  Outcome o;
  Program p = program("exp_approx");
  const Procedure& proc = p.procedures.front();
  Rational worst_ratio = 0;
  unsigned cells = 0;
  for (const Rational& x : {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)}) {
    Enclosure e = oracles::exp_value(x, kOracleBits);
    for (unsigned n = 1; n <= 10; ++n) {
      ResultSet r = run_procedure(*p.algebra, proc, {nat(n), Value::interval(Real(x))}, ChoiceStrategy::dovetail(), kFuel);
      std::string at = "x=" + to_string(x) + " n=" + std::to_string(n);
      if (!r.singleton()) {
        o.require(false, at + " not a single value");
        continue;
      }
      Rational v = r.values[0][0].as_real().exact();
      o.require(v == direct_partial_sum(x, n), at + " differs from the partial sum");
      Rational dev = abs(Rational(v - e.center)) + e.radius;
      o.require(dev < two_to(-static_cast<long>(n)), at + " deviates by " + to_decimal(dev, 12));
      worst_ratio = std::max(worst_ratio, Rational(dev / two_to(-static_cast<long>(n))));
      ++cells;
    }
  }
  summary = std::to_string(cells) + " cells exact; max deviation/2^-n = " + to_decimal(worst_ratio, 6);
  return o;
}

// ------------------------------------------------------------ 2

Outcome pivot_sets(std::string& summary) {
  Outcome o;
  Program p = program("pivot");
  const Procedure& proc = p.procedures.front();
  unsigned checked = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        const int xs[3] = {a, b, c};
        std::set<unsigned long> want;
        for (unsigned i = 0; i < 3; ++i)
          if (xs[i] != 0) want.insert(i + 1);
        ResultSet r = run_procedure(*p.algebra, proc, {real(a), real(b), real(c)}, ChoiceStrategy::enumerate(), 200'000);
        std::set<unsigned long> got;
        for (const auto& v : r.values) got.insert(v[0].as_nat().get_ui());
        std::string at = "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
        if (want.empty())
          o.require(got.empty() && r.maybe_divergent, at + " should be empty and maybe divergent");
        else
          o.require(got == want && !r.maybe_divergent, at + " outcome set differs");
        ++checked;
      }
  summary = std::to_string(checked) + " tuples, choose range 0..32";
  return o;
}

// ------------------------------------------------------------ 3

Outcome bisection(std::string& summary) {
  Outcome o;
  std::ostringstream info;
  auto check = [&](const std::string& name, const Program& prog, const std::vector<ValueTuple>& inputs,
                   const std::vector<unsigned>& ns, const std::vector<ChoiceStrategy>& strategies) {
    const StdlibEntry& e = program_entry(name);
    ApproxOptions opt;
    opt.precision_input = e.precision_input;
    opt.strategies = strategies;
    opt.fuel = kFuel;
    std::vector<ApproxReport> reports;
    for (unsigned n : ns) {
      ApproxReport r = check_multi_approx(*prog.algebra, prog.procedure(e.procedure), multi_oracle(e.oracle), inputs, n, n, opt);
      for (const auto& line : r.lines())
        if (line.rfind("FAIL", 0) == 0) o.require(false, line);
      reports.push_back(std::move(r));
    }
    return reports;
  };

  Program rb = program("root_bisect");
  std::vector<unsigned> all_n = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  check("root_bisect", rb, {{polynomial_value({1, 0, -2})}, {polynomial_value({1, 0, -1, 0})}}, all_n, dovetail_seeds(0, 5));

  Program fa = program("root_bisect_fa");
  auto zero = check("root_bisect_fa", fa, {{real(0)}}, {8}, dovetail_seeds(0, 50));
  std::size_t covered = zero.at(0).coverage.at(0).covered;
  o.require(covered >= 2, "a = 0: only " + std::to_string(covered) + " distinct roots over 50 seeds");
  info << "f_0: " << covered << "/3 roots over 50 seeds";

  check("root_bisect_fa", fa, {{real(2)}, {real(-2)}}, {1, 4, 8}, {ChoiceStrategy::dovetail()});

  ResultSet sq = run_procedure(*rb.algebra, rb.procedure("root_bisect"), {nat(3), polynomial_value({1, 0, 0})},
                               ChoiceStrategy::dovetail(), kDivergenceFuel);
  o.require(sq.empty() && sq.maybe_divergent, "X^2 should be maybe divergent at fuel 10^5");
  info << "; X^2 maybe divergent at fuel 10^5";
  summary = info.str();
  return o;
}

// ------------------------------------------------------------ 4

Outcome choose_elimination(std::string& summary) {
  Outcome o;
  unsigned runs = 0;
  for (const char* name : {"least_divisor", "isqrt", "ackermann_toy"}) {
    const StdlibEntry& e = program_entry(name);
    Program p = e.parse();
    const Procedure& proc = p.procedure(e.procedure);
    Procedure elim = choose_eliminate(proc, *p.algebra);
    o.require(!contains_choose(*elim.body), std::string(name) + ": rewrite still chooses");
    SingleOracle F = single_oracle(e.oracle);
    for (unsigned n = 0; n <= 100; ++n) {
      ResultSet a = run_procedure(*p.algebra, proc, {nat(n)}, ChoiceStrategy::dovetail(), kFuel);
      ResultSet b = run_procedure(*p.algebra, elim, {nat(n)}, ChoiceStrategy::dovetail(), kFuel);
      std::string at = std::string(name) + "(" + std::to_string(n) + ")";
      if (!a.singleton() || !b.singleton()) {
        o.require(false, at + " not a single value");
        continue;
      }
      o.require(identical(a.values[0], b.values[0]), at + " differs from its rewrite");
      auto want = F({nat(n)}, 0);
      bool oracle_ok = want && want->size() == a.values[0].size();
      for (std::size_t i = 0; oracle_ok && i < want->size(); ++i)
        oracle_ok = Rational(a.values[0][i].as_nat()) == (*want)[i].center;
      o.require(oracle_ok, at + " differs from the oracle");
      ++runs;
    }
  }
  summary = std::to_string(runs) + " inputs, programs and rewrites agree";
  return o;
}

// ------------------------------------------------------------ 5

Outcome code_square(std::string& summary) {
  Outcome o;
  static const RationalCodes rc = rational_code_algebra(shared_builtin("RN"));
  o.require(rc.cert.all_passed(), "certificate has failures");

  std::vector<Rational> qs;
  for (int i = 0; i < 20; ++i) qs.push_back(Rational(7 * i - 61, 1 + (i * 5) % 9));

  struct Case {
    std::string name;
    Procedure proc;
    std::function<ValueTuple(int)> input;
  };
  std::vector<Case> cases;
  cases.push_back({"square_plus_one", parse("algebra RN\nfunc f in x: real out y: real begin y := x * x + 1 end"),
                   [&](int i) { return ValueTuple{real(qs[i])}; }});
  cases.push_back({"geometric_loop",
                   parse("algebra RN\nfunc g in x: real, n: nat out s: real begin s := 0; "
                         "for j := 1 to n do s := s * x + 1 od end"),
                   [&](int i) { return ValueTuple{real(qs[i] / 10), nat(i % 7)}; }});
  cases.push_back({"ordered_gap",
                   parse("algebra RN\nfunc h in a, b: real out m: real begin "
                         "if a < b then m := (b - a) / (1 + a * a) else m := (a - b) / (1 + b * b) fi end"),
                   [&](int i) { return ValueTuple{real(qs[i]), real(qs[(i + 3) % 20] + Rational(1, 7))}; }});
  cases.push_back({"pivot", program("pivot", "RN").procedures.front(), [&](int i) {
                     return ValueTuple{real(i % 3 ? qs[i] : Rational(0)), real(i % 2 ? Rational(0) : qs[(i + 1) % 20]),
                                       real(qs[(i + 2) % 20])};
                   }});
  cases.push_back({"choose_near", program("choose_near", "RN").procedures.front(),
                   [&](int i) { return ValueTuple{real(qs[i] / 3), nat(i % 5)}; }});

  unsigned compared = 0;
  for (const Case& c : cases) {
    for (int i = 0; i < 20; ++i) {
      ValueTuple x = c.input(i);
      ValueTuple codes;
      std::vector<Sort> in = c.proc.input_sorts();
      for (std::size_t j = 0; j < x.size(); ++j) codes.push_back(rc.encode(in[j], x[j]));
      ResultSet on_codes = run_procedure(*rc.algebra, c.proc, codes, ChoiceStrategy::dovetail(), kFuel);
      ResultSet on_values = run_procedure(*shared_builtin("RN"), c.proc, x, ChoiceStrategy::dovetail(), kFuel);
      std::string at = c.name + " " + to_string(x);
      if (!on_codes.singleton() || !on_values.singleton()) {
        o.require(false, at + " not a single value");
        continue;
      }
      ValueTuple decoded = decode(rc.alpha, c.proc.output_sorts(), on_codes.values[0]);
      bool same = decoded.size() == on_values.values[0].size();
      for (std::size_t j = 0; same && j < decoded.size(); ++j) {
        const Value& a = decoded[j];
        const Value& b = on_values.values[0][j];
        same = a.is_real() ? a.as_real().exact() == b.as_real().exact() : identical(ValueTuple{a}, ValueTuple{b});
      }
      o.require(same, at + " square does not commute");
      ++compared;
    }
  }
  summary = std::to_string(compared) + " runs over 5 programs";
  return o;
}

// ------------------------------------------------------------ 6

const ClosureCodes& interval_codes() {
  static const ClosureCodes cc = closure_code_algebra(shared_builtin("IN"));
  return cc;
}

const ClosureCodes& real_codes() {
  static const ClosureCodes cc = closure_code_algebra(shared_builtin("RN"));
  return cc;
}

Outcome exp_lift(std::string& summary) {
  Outcome o;
  const ClosureCodes& cc = interval_codes();
  Program p = program("exp_approx");
  Rational worst = 0;
  for (const Rational& x : {Rational(0), Rational(1, 3), Rational(1)}) {
    LiftResult lr = soundness_lift(cc, p.procedures.front(), {cc.add(Real(x))});
    Enclosure e = oracles::exp_value(x, kOracleBits);
    for (unsigned n = 0; n <= 8; ++n) {
      Rational dev = abs(Rational(ecode_eval(*lr.code, n) - e.center)) + e.radius;
      o.require(dev < two_to(1 - static_cast<long>(n)), "x=" + to_string(x) + " n=" + std::to_string(n) +
                                                            " deviates by " + to_decimal(dev, 12));
      worst = std::max(worst, Rational(dev / two_to(1 - static_cast<long>(n))));
    }
  }
  summary = "27 cells; max deviation/2^(1-n) = " + to_decimal(worst, 6);
  return o;
}

// ------------------------------------------------------------ 7

Outcome approximant(std::string& summary) {
  Outcome o;
  const ClosureCodes& cc = real_codes();
  TrackingFn sq = closure_tracking(cc, "square", [](const Real& x, Fuel&) -> Verdict<Real> { return real_arith::mul(x, x); });
  // (-2, 2) as B(-1, 1) u B(0, 1) u B(1, 1); |x^2 - y^2| <= 4 |x - y| there.
  LUCModulus m{EffOpenCover::rational_balls({{-1, 0}, {0, 0}, {1, 0}}),
               [](const Natural&, unsigned n) { return Natural(n + 2); }};
  std::vector<Real> xs;
  for (int i = 0; i < 16; ++i) xs.push_back(Real(Rational(-15 + 2 * i, 8 + i % 3)));
  xs.push_back(Real(sqrt_code(2)));
  xs.push_back(real_arith::neg(Real(sqrt_code(3))));
  xs.push_back(Real(sqrt_code(Rational(1, 2))));
  xs.push_back(real_arith::add(Real(exp_code(Rational(1, 2))), Real(Rational(-1))));

  unsigned cells = 0;
  for (const Real& x : xs) {
    for (unsigned n = 0; n <= 10; ++n) {
      Fuel fuel(10 * kFuel);
      Verdict<Value> g = adequacy_g(sq, m, cc, {Value::real(x)}, n, ChoiceStrategy::dovetail(), fuel);
      std::string at = x.describe() + " n=" + std::to_string(n);
      if (!g.converged()) {
        o.require(false, at + " did not converge");
        continue;
      }
      Rational d = real_arith::distance(g.value().as_real(), real_arith::mul(x, x), kDistanceBits);
      o.require(d + two_to(-static_cast<long>(kDistanceBits)) < two_to(-static_cast<long>(n)), at + " outside the ball");
      ++cells;
    }
  }
  summary = std::to_string(xs.size()) + " points (16 rationals, 4 codes), " + std::to_string(cells) + " cells";
  return o;
}

// ------------------------------------------------------------ 8

std::set<std::string> outputs(const ResultSet& r) {
  std::set<std::string> s;
  for (const auto& v : r.values) s.insert(to_string(v));
  return s;
}

Outcome properties(std::string& summary) {
  Outcome o;
  std::vector<std::string> done;

  {  // fast Cauchy prefix invariant over every code emitted so far
    std::size_t n = 0;
    for (const ClosureCodes* cc : {&interval_codes(), &real_codes()})
      for (std::size_t i = 0; i < cc->store->size(); ++i, ++n) {
        PrefixReport r = validate_prefix(*cc->store->at(Natural(static_cast<unsigned long>(i))), 6, 8);
        o.require(r.ok, "code " + std::to_string(i) + ": " + r.detail);
      }
    done.push_back("prefix(" + std::to_string(n) + " codes)");
  }

  {  // fuel monotonicity of apply
    AlgebraPtr rn = shared_builtin("RN");
    std::vector<std::pair<std::string, std::vector<Value>>> calls = {
        {"less_real", {Value::real(Real(sqrt_code(2))), real(Rational(1414, 1000))}},
        {"less_real", {real(1), real(1)}},
        {"inv_real", {Value::real(Real(sqrt_code(3)))}},
        {"eq_real", {real(Rational(1, 3)), real(Rational(1, 2))}},
        {"add_real", {real(2), real(Rational(-1, 5))}}};
    for (const auto& [sym, args] : calls) {
      std::optional<std::string> first;
      for (std::uint64_t k : {1, 4, 16, 64, 256, 1024, 4096}) {
        Fuel fuel(k);
        Verdict<Value> v = rn->apply(sym, args, fuel);
        if (first) o.require(v.converged() && v.value().to_string() == *first, sym + ": answer lost at fuel " + std::to_string(k));
        else if (v.converged()) first = v.value().to_string();
      }
    }
    done.push_back("apply fuel");
  }

  Program pivot = program("pivot");
  const Procedure& pp = pivot.procedures.front();

  {  // fuel monotonicity of eval_stmt
    Machine m(*pivot.algebra, ChoiceStrategy::enumerate(8));
    State s = m.initial_state(pp, {real(1), real(0), real(-2)});
    std::vector<State> prev;
    for (std::uint64_t k : {20, 100, 500, 2500, 12500, 62500}) {
      Fuel fuel(k);
      StateSet got = m.eval_stmt(pp.body, s, fuel);
      for (const State& old : prev) {
        bool kept = false;
        for (const State& st : got.values) kept = kept || identical(st, old);
        o.require(kept, "eval_stmt lost a leaf at fuel " + std::to_string(k));
      }
      prev = got.values;
    }
    done.push_back("eval_stmt fuel");
  }

  {  // stage prefix
    Program fa = program("root_bisect_fa");
    const Procedure& fp = fa.procedures.front();
    for (const auto& [alg, proc, x] :
         {std::tuple<const PartialAlgebra*, const Procedure*, ValueTuple>{pivot.algebra.get(), &pp, {real(1), real(0), real(2)}},
          {fa.algebra.get(), &fp, {nat(2), real(0)}}}) {
      Machine m(*alg, ChoiceStrategy::enumerate(6));
      State s = m.initial_state(*proc, x);
      Fuel fuel(kFuel);
      CompTree prev = m.comp_tree_stage(proc->body, s, 0, fuel);
      for (unsigned n = 1; n <= 5; ++n) {
        CompTree next = m.comp_tree_stage(proc->body, s, n, fuel);
        o.require(prev.is_prefix_of(next), proc->name + ": stage " + std::to_string(n - 1) + " is not a prefix");
        prev = std::move(next);
      }
    }
    done.push_back("stage prefix");
  }

  {  // initialisation independence
    Program exp = program("exp_approx");
    Program near = program("choose_near");
    for (const auto& [prog, x] : {std::pair<const Program*, ValueTuple>{&exp, {nat(3), Value::interval(Real(Rational(2, 3)))}},
                                  {&near, {real(Rational(-5, 7)), nat(5)}}}) {
      const Procedure& p = prog->procedures.front();
      Machine m(*prog->algebra, ChoiceStrategy::dovetail());
      Fuel f1(kFuel);
      ResultSet base = m.eval_proc(p, x, f1);
      State st = m.initial_state(p, x);
      for (std::size_t i = p.in.size(); i < st.size(); ++i) {
        if (st[i].is_nat()) st[i] = nat(777);
        else if (st[i].is_real()) st[i] = real(Rational(-31, 9));
        else if (st[i].is_bool()) st[i] = Value::boolean(!st[i].as_bool());
      }
      Fuel f2(kFuel);
      ResultSet other = m.eval_proc_from(p, x, st, f2);
      o.require(outputs(base) == outputs(other) && base.maybe_divergent == other.maybe_divergent,
                p.name + ": result depends on the initial state");
    }
    done.push_back("init independence");
  }

  {  // strategy soundness
    Program near = program("choose_near");
    std::vector<std::pair<const Program*, ValueTuple>> runs = {
        {&pivot, {real(1), real(1), real(0)}}, {&pivot, {real(0), real(-3), real(5)}}, {&near, {real(Rational(1, 3)), nat(1)}}};
    for (const auto& [prog, x] : runs) {
      const Procedure& p = prog->procedures.front();
      std::set<std::string> all = outputs(run_procedure(*prog->algebra, p, x, ChoiceStrategy::enumerate(), 200'000));
      for (std::uint64_t seed = 0; seed < 10; ++seed)
        for (const ChoiceStrategy& s : {ChoiceStrategy::dovetail(seed), ChoiceStrategy::oracle(seed)})
          for (const std::string& v : outputs(run_procedure(*prog->algebra, p, x, s, 200'000)))
            o.require(all.count(v) == 1, p.name + ": " + s.to_string() + " gave " + v + " outside the enumeration");
    }
    done.push_back("strategy soundness");
  }

  {  // continuity sampling: some delta in 2^-1..2^-20 keeps P_n(x) meeting B(b, 2^-m)
    Program exp = program("exp_approx");
    const Procedure& ep = exp.procedures.front();
    const unsigned m = 10;
    for (const Rational& a : {Rational(1, 5), Rational(1, 2), Rational(7, 8)}) {
      for (unsigned n : {1u, 3u}) {
        ResultSet at = run_procedure(*exp.algebra, ep, {nat(n), Value::interval(Real(a))}, ChoiceStrategy::dovetail(), kFuel);
        Rational b = at.values.at(0)[0].as_real().exact();
        bool found = false;
        for (long j = 1; j <= 20 && !found; ++j) {
          bool all = true;
          for (int i = 1; i <= 10 && all; ++i) {
            Rational x = a + two_to(-j) * Rational(i % 2 ? i : -i, 11);
            ResultSet r = run_procedure(*exp.algebra, ep, {nat(n), Value::interval(Real(x))}, ChoiceStrategy::dovetail(), kFuel);
            all = r.singleton() && abs(Rational(r.values[0][0].as_real().exact() - b)) < two_to(-static_cast<long>(m));
          }
          found = all;
        }
        o.require(found, "exp_approx not continuous at " + to_string(a));
      }
    }
    ResultSet at = run_procedure(*pivot.algebra, pp, {real(1), real(0), real(-1)}, ChoiceStrategy::enumerate(4), 200'000);
    for (const std::string& b : outputs(at)) {
      bool found = false;
      for (long j = 1; j <= 20 && !found; ++j) {
        bool all = true;
        for (int i = 1; i <= 10 && all; ++i) {
          Rational h = two_to(-j) * Rational(i % 2 ? i : -i, 11);
          ValueTuple x = {real(1 + h), real(h), real(-1 - h)};
          all = outputs(run_procedure(*pivot.algebra, pp, x, ChoiceStrategy::enumerate(4), 200'000)).count(b) == 1;
        }
        found = all;
      }
      o.require(found, "pivot not continuous at (1,0,-1) for output " + b);
    }
    done.push_back("continuity");
  }

  summary = "";
  for (const auto& d : done) summary += (summary.empty() ? "" : ", ") + d;
  return o;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "exp approximation", kLimitExp, exp_approximation},
      {2, "pivot outcome sets", kLimitPivot, pivot_sets},
      {3, "bisection", kLimitBisect, bisection},
      {4, "choose elimination", kLimitElim, choose_elimination},
      {5, "code-algebra square", kLimitSquare, code_square},
      {6, "lift of the exp program", kLimitLift, exp_lift},
      {7, "approximant from tracking", kLimitApproximant, approximant},
      {8, "property suites", 0, properties},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string summary;
    Outcome o;
    try {
      o = c.run(summary);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.limit == 0 || secs < c.limit;
    bool pass = o.ok && in_time;
    failed += !pass;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (pass ? "PASS " : "FAIL ") << c.id << " " << c.title << ": " << summary << " [" << secs << " s";
    if (c.limit > 0) line << " / limit " << c.limit << " s";
    line << "; verified on samples]";
    std::cout << line.str() << "\n";
    if (!in_time) std::cout << "  over the runtime limit\n";
    for (const auto& n : o.notes) std::cout << "  " << n << "\n";
    std::cout.flush();
  }
  return failed ? 1 : 0;
}

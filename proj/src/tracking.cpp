#include "whilecc/tracking.hpp"

#include <algorithm>
#include <mutex>

#include "whilecc/lang.hpp"
#include "whilecc/real_arith.hpp"

namespace whilecc {

namespace ra = real_arith;

namespace {

constexpr unsigned kEqualityBits = 20;

Natural to_code(const Value& v) {
  if (v.is_bool()) return Natural(v.as_bool() ? 1 : 0);
  if (v.is_nat()) return v.as_nat();
  if (v.is_code()) return v.as_code();
  throw InvalidCode("value " + v.to_string() + " is not a code");
}

Value from_code(const Sort& s, const Natural& k) {
  if (s.is_bool()) return Value::boolean(k == 1);
  if (s.is_nat()) return Value::nat(k);
  return Value::code(k);
}

const Real* real_of(const Value& v) {
  if (v.is_real()) return &v.as_real();
  if (v.is_interval()) return &v.as_interval();
  return nullptr;
}

// Exact for discrete sorts; "not refuted at 2^-20" for reals.
bool same_value(const Value& a, const Value& b, std::string& detail) {
  const Real* x = real_of(a);
  const Real* y = real_of(b);
  if (x && y) {
    Rational d = ra::distance(*x, *y, kEqualityBits + 2);
    if (d <= pow2(-static_cast<long>(kEqualityBits))) {
      detail = "equal to 2^-20";
      return true;
    }
    detail = "differ by about " + to_decimal(d, 8);
    return false;
  }
  if (a.identical(b)) {
    detail = "equal";
    return true;
  }
  detail = a.to_string() + " vs " + b.to_string();
  return false;
}

std::string sample_text(const std::vector<Natural>& k) {
  std::string s = "(";
  for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + k[i].get_str();
  return s + ")";
}

Verdict<bool> all_of(const std::vector<Verdict<bool>>& parts) {
  bool pending = false;
  for (const auto& p : parts) {
    if (p.converged() && !p.value()) return false;
    if (!p.converged()) pending = true;
  }
  if (pending) return FuelExhausted{};
  return true;
}

// d(x, c) < r on one component; discrete sorts use the 0/1 metric.
Verdict<bool> within(const Value& x, const Value& c, const Rational& r, Fuel& fuel) {
  const Real* a = real_of(x);
  const Real* b = real_of(c);
  if (a && b) return ra::less(ra::dist(*a, *b), Real(r), fuel);
  return Rational(x.identical(c) ? 0 : 1) < r;
}

std::vector<Natural> untuple(const Natural& z, std::size_t n) {
  std::vector<Natural> out;
  Natural rest = z;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto [a, b] = unpair(rest);
    out.push_back(a);
    rest = b;
  }
  out.push_back(rest);
  return out;
}

DovetailOrder order_for(const ChoiceStrategy& s) {
  if (s.kind == ChoiceStrategy::Kind::Dovetail) return DovetailOrder(s.seed, s.jumps, s.jump_bits);
  return {};
}

ValueTuple centers(const EffOpenCover& cover, const Enumeration& alpha, const EffOpenCover::Ball& b) {
  ValueTuple out;
  for (std::size_t j = 0; j < cover.sorts.size(); ++j) out.push_back(alpha(cover.sorts[j], b.center[j]));
  return out;
}

}  // namespace

// ------------------------------------------------------------ reports

AbstractFn AbstractFn::of(AlgebraPtr a, const std::string& symbol) {
  const FuncSymbol& f = a->signature().at(symbol);
  return {symbol, f.args, f.result,
          [a, symbol](const ValueTuple& x, Fuel& fuel) { return a->apply(symbol, x, fuel); }};
}

bool TrackingReport::passed() const { return failures() == 0; }

std::size_t TrackingReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const Entry& e) { return e.status == Status::Fail; }));
}

std::vector<std::string> TrackingReport::lines() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    const char* tag = e.status == Status::Pass ? "PASS" : e.status == Status::Fail ? "FAIL" : "UNDECIDED";
    out.push_back(std::string(tag) + " " + name + ":" + e.check + " " + sample_text(e.sample) + " " + e.detail);
  }
  return out;
}

TrackingReport check_tracking(const AbstractFn& F, const TrackingFn& f, const Enumeration& alpha,
                              const std::vector<std::vector<Natural>>& samples, bool strict, std::uint64_t fuel) {
  using Status = TrackingReport::Status;
  TrackingReport rep;
  rep.name = f.name;
  for (const auto& k : samples) {
    auto add = [&](Status st, const char* check, std::string detail) {
      rep.entries.push_back({k, st, check, std::move(detail)});
    };
    ValueTuple x;
    try {
      if (k.size() != F.in.size()) throw InvalidCode("sample arity");
      for (std::size_t i = 0; i < k.size(); ++i) x.push_back(alpha(F.in[i], k[i]));
    } catch (const InvalidCode& e) {
      add(Status::Undecided, "square", std::string("sample outside Omega: ") + e.what());
      continue;
    }
    Fuel f1(fuel), f2(fuel);
    Verdict<Value> Fx = F.fn(x, f1);
    Verdict<Natural> fk = f(k, f2);
    if (Fx.converged()) {
      if (!fk.converged()) {
        add(Status::Fail, "square", std::string("F defined but f is ") + fk.kind_name());
      } else if (!alpha.contains(F.out, fk.value())) {
        add(Status::Fail, "square", "f(k) = " + fk.value().get_str() + " is outside Omega");
      } else {
        std::string detail;
        bool ok = same_value(alpha(F.out, fk.value()), Fx.value(), detail);
        add(ok ? Status::Pass : Status::Fail, "square", detail);
      }
    } else if (Fx.proven_divergent()) {
      if (!strict)
        add(Status::Pass, "square", "F undefined");
      else if (fk.converged())
        add(Status::Fail, "strict", "f(k) = " + fk.value().get_str() + " but F is undefined");
      else
        add(Status::Pass, "strict", std::string("both undefined (f ") + fk.kind_name() + ")");
    } else {
      add(Status::Undecided, strict ? "strict" : "square", "F pending within fuel");
    }
  }
  return rep;
}

TrackingFn lifted_tracking(const AbstractFn& F, const Enumeration& alpha, Encoder encode) {
  TrackingFn t;
  t.name = F.name;
  t.in = F.in;
  t.out = F.out;
  t.rule = [F, alpha, encode](const std::vector<Natural>& k, Fuel& fuel) -> Verdict<Natural> {
    ValueTuple x;
    try {
      for (std::size_t i = 0; i < k.size(); ++i) x.push_back(alpha(F.in[i], k[i]));
    } catch (const InvalidCode&) {
      return ProvenDivergent{};
    }
    Verdict<Value> v = F.fn(x, fuel);
    if (!v.converged()) return v.divergence<Natural>();
    return encode(F.out, v.value());
  };
  return t;
}

// ------------------------------------------------------------ certificates

std::vector<std::string> EffectivityCert::uncovered() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : signature.symbols())
    if (!trackers.count(name)) out.push_back(name);
  return out;
}

bool EffectivityCert::all_passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.second.passed(); });
}

EffectivityCert certify(AlgebraPtr a, const Enumeration& alpha, Encoder encode,
                        const std::map<Sort, std::vector<Natural>>& sample_codes, std::size_t max_samples) {
  EffectivityCert cert;
  cert.signature = a->signature();
  for (const auto& [name, sym] : a->signature().symbols()) {
    bool covered = alpha.covers(sym.result);
    for (const auto& s : sym.args) covered = covered && alpha.covers(s) && sample_codes.count(s);
    if (!covered) continue;
    AbstractFn F = AbstractFn::of(a, name);
    TrackingFn f;
    if (sym.conditional) {
      // if_s(b, k1, k2) selects a code: no decoding needed.
      f = {name, sym.args, sym.result, [](const std::vector<Natural>& k, Fuel&) -> Verdict<Natural> {
             return k[0] == 1 ? k[1] : k[2];
           }};
    } else {
      f = lifted_tracking(F, alpha, encode);
    }
    std::vector<std::vector<Natural>> samples;
    std::size_t total = 1;
    for (const auto& s : sym.args) total *= sample_codes.at(s).size();
    const std::size_t count = std::min(total, max_samples);
    const std::size_t step = std::max<std::size_t>(1, total / std::max<std::size_t>(1, count));
    for (std::size_t t = 0; t < count; ++t) {
      std::size_t idx = t * step;
      std::vector<Natural> k;
      for (const auto& s : sym.args) {
        const auto& list = sample_codes.at(s);
        k.push_back(list[idx % list.size()]);
        idx /= list.size();
      }
      samples.push_back(std::move(k));
    }
    cert.reports[name] = check_tracking(F, f, alpha, samples, true, 2000);
    cert.trackers[name] = std::move(f);
  }
  cert.literal = [a, encode](const Sort& s, const Rational& q) { return encode(s, a->literal(s, q)); };
  return cert;
}

std::shared_ptr<PartialAlgebra> code_algebra(const Enumeration& alphabar, const EffectivityCert& certs) {
  auto missing = certs.uncovered();
  if (!missing.empty()) throw UncoveredSymbol("no tracking function for '" + missing.front() + "'");
  auto a = std::make_shared<PartialAlgebra>("codes(" + alphabar.name() + ")", certs.signature);
  for (const auto& [name, f] : certs.trackers) {
    const Sort out = f.out;
    TrackingFn tracker = f;
    a->define(name, [tracker, out](const std::vector<Value>& args, Fuel& fuel) -> Verdict<Value> {
      std::vector<Natural> k;
      k.reserve(args.size());
      for (const auto& v : args) k.push_back(to_code(v));
      Verdict<Natural> r = tracker(k, fuel);
      if (!r.converged()) return r.divergence<Value>();
      return from_code(out, r.value());
    });
  }
  algebra_parts::install_discrete_and_array_metrics(*a);
  for (const Sort& s : certs.signature.sorts()) {
    if (s.is_bool() || s.is_nat() || s.starred()) continue;
    a->define_metric(s, [alphabar, s](const Value& x, const Value& y, unsigned n) {
      Value dx = decode(alphabar, s, x), dy = decode(alphabar, s, y);
      const Real* p = real_of(dx);
      const Real* q = real_of(dy);
      if (!p || !q) throw AlgebraError("no metric on codes of sort " + s.name());
      return ra::distance(*p, *q, n);
    });
  }
  auto literal = certs.literal;
  a->set_literal([literal](const Sort& s, const Rational& q) -> Value {
    if (s.is_nat()) {
      if (q.get_den() != 1 || q < 0) throw AlgebraError("natural literal must be a nonnegative integer");
      return Value::nat(q.get_num());
    }
    return Value::code(literal(s, q));
  });
  return a;
}

Value decode(const Enumeration& alpha, const Sort& s, const Value& v) {
  if (s.is_bool() || s.is_nat()) return v;
  return alpha(s, v.as_code());
}

ValueTuple decode(const Enumeration& alpha, const std::vector<Sort>& sorts, const ValueTuple& codes) {
  ValueTuple out;
  for (std::size_t i = 0; i < codes.size(); ++i) out.push_back(decode(alpha, sorts.at(i), codes[i]));
  return out;
}

// ------------------------------------------------------------ rational codes

namespace {

Natural rational_encode(const Sort& s, const Value& v) {
  if (s.is_bool()) return Natural(v.as_bool() ? 1 : 0);
  if (s.is_nat()) return v.as_nat();
  const Real* r = real_of(v);
  if (!r || !r->is_exact()) throw InvalidCode("value " + v.to_string() + " has no rational code");
  return rat_index(r->exact());
}

std::vector<Natural> rat_codes(std::initializer_list<Rational> qs) {
  std::vector<Natural> out;
  for (const auto& q : qs) out.push_back(rat_index(q));
  return out;
}

}  // namespace

Value RationalCodes::encode(const Sort& s, const Value& v) const {
  if (s.is_bool() || s.is_nat()) return v;
  return Value::code(rational_encode(s, v));
}

RationalCodes rational_code_algebra(AlgebraPtr base) {
  RationalCodes rc;
  rc.base = base;
  rc.alpha = alpha_rat();
  std::map<Sort, std::vector<Natural>> samples;
  samples[Sort::boolean()] = {0, 1};
  samples[Sort::nat()] = {0, 1, 2, 3, 7};
  samples[Sort::real()] = rat_codes({0, 1, -1, Rational(1, 2), Rational(-3, 2), 2, Rational(1, 3)});
  samples[Sort::interval()] = rat_codes({0, Rational(1, 2), 1, Rational(1, 3)});
  rc.cert = certify(base, rc.alpha, rational_encode, samples);
  rc.algebra = code_algebra(rc.alpha, rc.cert);
  return rc;
}

// ------------------------------------------------------------ closure codes

Natural ClosureCodes::econ(const Natural& k) const {
  auto it = econ_memo_->find(k);
  if (it != econ_memo_->end()) return it->second;
  Natural idx = store->add(const_code(alpha, k));
  econ_memo_->emplace(k, idx);
  return idx;
}

ClosureCodes closure_code_algebra(AlgebraPtr base) {
  ClosureCodes c;
  c.base = base;
  c.alpha = alpha_rat();
  c.store = std::make_shared<CodeStore>();
  c.alphabar = computable_closure(c.alpha, c.store);
  auto store = c.store;
  Encoder encode = [store](const Sort& s, const Value& v) -> Natural {
    if (s.is_bool()) return Natural(v.as_bool() ? 1 : 0);
    if (s.is_nat()) return v.as_nat();
    const Real* r = real_of(v);
    if (!r) throw InvalidCode("value " + v.to_string() + " has no closure code");
    return store->add(r->code());
  };
  std::map<Sort, std::vector<Natural>> samples;
  samples[Sort::boolean()] = {0, 1};
  samples[Sort::nat()] = {0, 1, 2, 5};
  for (const Rational& q : {Rational(0), Rational(1), Rational(-1), Rational(1, 2), Rational(-3, 2), Rational(1, 3)})
    samples[Sort::real()].push_back(store->add(ECode::constant(q)));
  samples[Sort::real()].push_back(store->add(sqrt_code(2)));
  for (const Rational& q : {Rational(0), Rational(1, 2), Rational(1), Rational(1, 3)})
    samples[Sort::interval()].push_back(store->add(ECode::constant(q)));
  c.cert = certify(base, c.alphabar, encode, samples);
  c.algebra = code_algebra(c.alphabar, c.cert);
  return c;
}

TrackingFn closure_tracking(const ClosureCodes& c, std::string name,
                            std::function<Verdict<Real>(const Real&, Fuel&)> F) {
  auto store = c.store;
  Enumeration alphabar = c.alphabar;
  TrackingFn t;
  t.name = std::move(name);
  t.in = {Sort::real()};
  t.out = Sort::real();
  t.rule = [store, alphabar, F](const std::vector<Natural>& k, Fuel& fuel) -> Verdict<Natural> {
    if (!alphabar.contains(Sort::real(), k.at(0))) return ProvenDivergent{};
    Verdict<Real> r = F(alphabar(Sort::real(), k[0]).as_real(), fuel);
    if (!r.converged()) return r.divergence<Natural>();
    return store->add(r.value().code());
  };
  return t;
}

// ------------------------------------------------------------ soundness lift

LiftAborted::LiftAborted(unsigned level, const std::string& why)
    : std::runtime_error("lift aborted at level " + std::to_string(level) + ": " + why), level_(level) {}

LiftResult soundness_lift(const ClosureCodes& c, const Procedure& P, const std::vector<Natural>& e,
                          const ChoiceStrategy& strategy, std::uint64_t fuel_per_level) {
  if (P.in.empty() || !P.in[0].sort.is_nat() || P.in.size() != e.size() + 1 || P.out.size() != 1)
    throw std::invalid_argument("soundness_lift needs P: nat x u -> s with |u| = " + std::to_string(e.size()));
  struct Levels {
    std::mutex mu;
    std::map<unsigned, ECodePtr> done;
  };
  auto levels = std::make_shared<Levels>();
  AlgebraPtr algebra = c.algebra;
  Enumeration alphabar = c.alphabar;
  Procedure proc = P;
  auto level = [levels, algebra, alphabar, proc, e, strategy, fuel_per_level](unsigned n) -> ECodePtr {
    {
      std::lock_guard<std::mutex> lock(levels->mu);
      if (auto it = levels->done.find(n); it != levels->done.end()) return it->second;
    }
    ValueTuple x{Value::nat(Natural(n))};
    for (std::size_t i = 0; i < e.size(); ++i) x.push_back(from_code(proc.in[i + 1].sort, e[i]));
    Machine m(*algebra, strategy);
    Fuel fuel(fuel_per_level);
    ResultSet r = m.eval_proc(proc, x, fuel);
    if (r.values.empty()) {
      std::string why;
      for (const auto& cause : r.causes) why += (why.empty() ? "" : ",") + cause;
      throw LiftAborted(n, why.empty() ? "no output" : why);
    }
    const Value out = decode(alphabar, proc.out[0].sort, r.values.front().at(0));
    const Real* v = real_of(out);
    if (!v) throw LiftAborted(n, "output is not a real");
    ECodePtr code = v->code();
    std::lock_guard<std::mutex> lock(levels->mu);
    levels->done.emplace(n, code);
    return code;
  };
  LiftResult res;
  res.code = diagonal_code(level, "lift(" + P.name + ")");
  res.index = c.store->add(res.code);
  return res;
}

// ------------------------------------------------------------ covers

EffOpenCover EffOpenCover::finite(std::vector<Sort> sorts, std::vector<Ball> balls, Relation r) {
  if (balls.empty()) throw std::invalid_argument("a cover needs at least one ball");
  EffOpenCover c;
  c.sorts = std::move(sorts);
  auto list = std::make_shared<const std::vector<Ball>>(std::move(balls));
  c.ball = [list](const Natural& i) {
    Natural m = i % static_cast<unsigned long>(list->size());
    return (*list)[m.get_ui()];
  };
  c.relation = r;
  return c;
}

EffOpenCover EffOpenCover::rational_balls(const std::vector<std::pair<Rational, unsigned>>& balls, Relation r) {
  std::vector<Ball> list;
  for (const auto& [q, l] : balls) list.push_back({{rat_index(q)}, l});
  return finite({Sort::real()}, std::move(list), r);
}

Verdict<bool> effective_open_membership(const EffOpenCover& cover, const Enumeration& alpha, const ValueTuple& x,
                                        Fuel& fuel, const DovetailOrder& order) {
  auto probe = [&](const Natural& i, Fuel& f) -> Verdict<bool> {
    EffOpenCover::Ball b = cover.ball(i);
    ValueTuple c = centers(cover, alpha, b);
    const Rational r = pow2(-static_cast<long>(b.radius_exp));
    std::vector<Verdict<bool>> parts;
    for (std::size_t j = 0; j < x.size(); ++j) parts.push_back(within(x[j], c[j], r, f));
    return all_of(parts);
  };
  Verdict<Natural> hit = dovetail_search(probe, fuel, order);
  if (hit.converged()) return true;
  return FuelExhausted{};
}

Verdict<bool> effective_open_membership(const EffOpenCover& cover, const Enumeration& alpha,
                                        const Enumeration& alphabar, const std::vector<Natural>& e, Fuel& fuel) {
  ValueTuple x;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (!alphabar.contains(cover.sorts.at(j), e[j])) return FuelExhausted{};
    x.push_back(alphabar(cover.sorts[j], e[j]));
  }
  return effective_open_membership(cover, alpha, x, fuel);
}

TrackingFn strictify_tracking(const TrackingFn& f, const EffOpenCover& cover, const Enumeration& alpha,
                              const Enumeration& alphabar) {
  TrackingFn g = f;
  g.name = f.name + "'";
  g.rule = [f, cover, alpha, alphabar](const std::vector<Natural>& k, Fuel& fuel) -> Verdict<Natural> {
    Verdict<bool> in = effective_open_membership(cover, alpha, alphabar, k, fuel);
    if (!in.converged()) return FuelExhausted{};
    return f(k, fuel);
  };
  return g;
}

TrackingReport check_modulus(const AbstractFn& F, const LUCModulus& m, const Enumeration& alpha,
                             const std::vector<ValueTuple>& points, unsigned max_n, std::uint64_t fuel) {
  using Status = TrackingReport::Status;
  constexpr unsigned kBalls = 16;
  constexpr unsigned kBits = 40;
  TrackingReport rep;
  rep.name = "LU(" + F.name + ")";
  auto dist = [&](const ValueTuple& a, const ValueTuple& b) {
    Rational d(0);
    for (std::size_t j = 0; j < a.size(); ++j) {
      const Real* p = real_of(a[j]);
      const Real* q = real_of(b[j]);
      Rational dj = p && q ? ra::distance(*p, *q, kBits) : Rational(a[j].identical(b[j]) ? 0 : 1);
      d = std::max(d, dj);
    }
    return d;
  };
  std::vector<std::optional<Value>> image;
  for (const auto& x : points) {
    Fuel f(fuel);
    Verdict<Value> v = F.fn(x, f);
    image.push_back(v.converged() ? std::optional<Value>(v.value()) : std::nullopt);
  }
  const Rational slack = pow2(-static_cast<long>(kBits) + 1);
  for (unsigned i = 0; i < kBalls; ++i) {
    EffOpenCover::Ball b = m.cover.ball(Natural(i));
    ValueTuple c = centers(m.cover, alpha, b);
    const Rational r = pow2(-static_cast<long>(b.radius_exp));
    std::vector<std::size_t> inside;
    for (std::size_t p = 0; p < points.size(); ++p)
      if (image[p] && dist(points[p], c) + slack < r) inside.push_back(p);
    for (std::size_t a = 0; a < inside.size(); ++a)
      for (std::size_t bb = a + 1; bb < inside.size(); ++bb) {
        const std::size_t p = inside[a], q = inside[bb];
        const Rational dxy = dist(points[p], points[q]);
        for (unsigned n = 0; n <= max_n; ++n) {
          Natural lu = m.lu(Natural(i), n);
          if (!(dxy + slack < pow2(-static_cast<long>(lu.get_ui())))) continue;
          std::string detail;
          const Real* u = real_of(*image[p]);
          const Real* w = real_of(*image[q]);
          Rational dF = u && w ? ra::distance(*u, *w, kBits) : Rational(image[p]->identical(*image[q]) ? 0 : 1);
          bool ok = dF + slack < pow2(-static_cast<long>(n));
          rep.entries.push_back({{Natural(static_cast<unsigned long>(p)), Natural(static_cast<unsigned long>(q)),
                                  Natural(i), Natural(n)},
                                 ok ? Status::Pass : Status::Fail,
                                 "modulus",
                                 "d(F x, F y) ~ " + to_decimal(dF, 12)});
        }
      }
  }
  return rep;
}

// ------------------------------------------------------------ approximant from tracking

Verdict<Natural> adequacy_mc(const LUCModulus& m, const Enumeration& alpha, const ValueTuple& x, unsigned n,
                             const ChoiceStrategy& strategy, Fuel& fuel) {
  const DovetailOrder order = order_for(strategy);
  const EffOpenCover& cover = m.cover;
  // Step 1: a ball containing x.
  auto ball_probe = [&](const Natural& i, Fuel& f) -> Verdict<bool> {
    EffOpenCover::Ball b = cover.ball(i);
    ValueTuple c = centers(cover, alpha, b);
    const Rational r = pow2(-static_cast<long>(b.radius_exp));
    std::vector<Verdict<bool>> parts;
    for (std::size_t j = 0; j < x.size(); ++j) parts.push_back(within(x[j], c[j], r, f));
    return all_of(parts);
  };
  Verdict<Natural> i = dovetail_search(ball_probe, fuel, order);
  if (!i.converged()) return i;
  EffOpenCover::Ball b = cover.ball(i.value());
  ValueTuple c = centers(cover, alpha, b);
  const Rational r = pow2(-static_cast<long>(b.radius_exp));
  // Step 2: d0 with d(x, c) + 2^-d0 < 2^-l.
  auto d0_probe = [&](const Natural& d, Fuel& f) -> Verdict<bool> {
    if (d > 4096) return false;
    const Rational eps = pow2(-static_cast<long>(d.get_ui()));
    std::vector<Verdict<bool>> parts;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const Real* p = real_of(x[j]);
      const Real* q = real_of(c[j]);
      if (p && q)
        parts.push_back(ra::less(ra::add(ra::dist(*p, *q), Real(eps)), Real(r), f));
      else
        parts.push_back(Rational(x[j].identical(c[j]) ? 0 : 1) + eps < r);
    }
    return all_of(parts);
  };
  Verdict<Natural> d0 = dovetail_search(d0_probe, fuel);
  if (!d0.converged()) return d0;
  Natural lu = m.lu(i.value(), n);
  return lu > d0.value() ? lu : d0.value();
}

Verdict<Value> adequacy_g(const TrackingFn& f, const LUCModulus& m, const ClosureCodes& c, const ValueTuple& x,
                          unsigned n, const ChoiceStrategy& strategy, Fuel& fuel) {
  // 1. M = MC_F(x, n+1)
  Verdict<Natural> M = adequacy_mc(m, c.alpha, x, n + 1, strategy, fuel);
  if (!M.converged()) return M.divergence<Value>();
  if (!M.value().fits_ulong_p()) return FuelExhausted{};
  const Rational radius = pow2(-static_cast<long>(M.value().get_ui()));
  const std::vector<Sort>& sorts = m.cover.sorts;
  auto econ = [&](const std::vector<Natural>& k) {
    std::vector<Natural> e;
    for (std::size_t j = 0; j < k.size(); ++j) e.push_back(sorts[j].is_nat() || sorts[j].is_bool() ? k[j] : c.econ(k[j]));
    return e;
  };
  // 2. choose k: d(alpha(k), x) < 2^-M and f(e_con[k]) defined, dovetailed.
  auto probe = [&](const Natural& z, Fuel& fz) -> Verdict<bool> {
    std::vector<Natural> k = untuple(z, sorts.size());
    std::vector<Verdict<bool>> parts;
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (!c.alpha.contains(sorts[j], k[j])) return false;
      parts.push_back(within(c.alpha(sorts[j], k[j]), x[j], radius, fz));
    }
    Verdict<bool> near = all_of(parts);
    if (!near.converged() || !near.value()) return near;
    Verdict<Natural> fk = f(econ(k), fz);
    if (fk.converged()) return true;
    return fk.divergence<bool>();
  };
  Verdict<Natural> z = dovetail_search(probe, fuel, order_for(strategy));
  if (!z.converged()) return z.divergence<Value>();
  // 3. e' = f(e_con[k])
  Verdict<Natural> e1 = f(econ(untuple(z.value(), sorts.size())), fuel);
  if (!e1.converged()) return e1.divergence<Value>();
  // 4. y = alpha({e'}(n+1))
  Rational y = c.store->at(e1.value())->at(n + 1);
  if (f.out == Sort::interval()) return Value::interval(Real(y));
  return Value::real(Real(y));
}

Natural godel_number(const Procedure& p) {
  const std::string text = print(p);
  // Balanced pairing tree keeps the number linear in the text length.
  std::function<Natural(std::size_t, std::size_t)> tree = [&](std::size_t lo, std::size_t hi) -> Natural {
    if (hi - lo == 1) return Natural(static_cast<unsigned char>(text[lo]));
    std::size_t mid = lo + (hi - lo) / 2;
    return pair(tree(lo, mid), tree(mid, hi));
  };
  Natural body = text.empty() ? Natural(0) : tree(0, text.size());
  return pair(Natural(static_cast<unsigned long>(text.size())), body);
}

}  // namespace whilecc

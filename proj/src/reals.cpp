#include "whilecc/reals.hpp"

#include <algorithm>

#include "whilecc/real_arith.hpp"

namespace whilecc {

bool Enumeration::contains(const Sort& s, const Natural& k) const {
  auto it = sorts_.find(s);
  if (it == sorts_.end()) return false;
  return k >= 0 && it->second.in_domain(k);
}

Value Enumeration::operator()(const Sort& s, const Natural& k) const {
  auto it = sorts_.find(s);
  if (it == sorts_.end()) throw InvalidCode(name_ + " does not enumerate sort " + s.name());
  if (k < 0 || !it->second.in_domain(k))
    throw InvalidCode(k.get_str() + " is outside the domain of " + name_ + " at sort " + s.name());
  return it->second.decode(k);
}

void add_base_sorts(Enumeration& e) {
  e.set(Sort::boolean(), {[](const Natural& k) { return k == 0 || k == 1; },
                          [](const Natural& k) { return Value::boolean(k == 1); }});
  e.set(Sort::nat(), {[](const Natural&) { return true; }, [](const Natural& k) { return Value::nat(k); }});
}

Enumeration alpha_rat() {
  Enumeration e("alpha_rat");
  add_base_sorts(e);
  e.set(Sort::real(), {[](const Natural&) { return true; },
                       [](const Natural& k) { return Value::real(Real(rat_decode(k))); }});
  e.set(Sort::interval(), {[](const Natural& k) {
                             Rational q = rat_decode(k);
                             return q >= 0 && q <= 1;
                           },
                           [](const Natural& k) { return Value::interval(Real(rat_decode(k))); }});
  return e;
}

Natural CodeStore::add(ECodePtr e) {
  if (!e) throw InvalidCode("null e-code");
  std::lock_guard<std::mutex> lock(mu_);
  codes_.push_back(std::move(e));
  return Natural(static_cast<unsigned long>(codes_.size() - 1));
}

bool CodeStore::contains(const Natural& index) const {
  std::lock_guard<std::mutex> lock(mu_);
  return index >= 0 && index.fits_ulong_p() && index.get_ui() < codes_.size();
}

ECodePtr CodeStore::at(const Natural& index) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (index < 0 || !index.fits_ulong_p() || index.get_ui() >= codes_.size())
    throw InvalidCode("no stored e-code at index " + index.get_str());
  return codes_[index.get_ui()];
}

std::size_t CodeStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return codes_.size();
}

bool CodeStore::validated(const Natural& index) const {
  ECodePtr e = at(index);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = checked_.find(index.get_ui());
    if (it != checked_.end()) return it->second;
  }
  bool ok = validate_prefix(*e).ok;
  std::lock_guard<std::mutex> lock(mu_);
  checked_[index.get_ui()] = ok;
  return ok;
}

ECodePtr const_code(const Enumeration& alpha, const Natural& k) {
  Value v = alpha(Sort::real(), k);
  if (!v.as_real().is_exact()) throw InvalidCode("const_code needs an enumeration of rationals");
  return ECode::constant_indexed(v.as_real().exact(), k);
}

namespace {

struct RunningModulus {
  std::function<Natural(unsigned)> m;
  Natural operator()(unsigned n) const {
    Natural best = m(0);
    for (unsigned j = 1; j <= n; ++j) best = std::max(best, m(j));
    return best;
  }
};

}  // namespace

ECodePtr c_to_e(const CCode& c) {
  RunningModulus mod{c.modulus};
  auto seq = c.sequence;
  ECodePtr e = ECode::sequence("comp(" + c.label + ")", [seq, mod](unsigned n) { return seq(mod(n)); });
  PrefixReport rep = validate_prefix(*e);
  if (!rep.ok) throw InvalidCode("c-code " + c.label + " fails the fast Cauchy check: " + rep.detail);
  return e;
}

Rational ecode_eval_via_modulus(const CCode& c, unsigned n) { return c.sequence(c.modulus(n)); }

Rational ecode_eval(const ECode& e, unsigned n) { return e.at(n); }

ECodePtr diagonal_code(std::function<ECodePtr(unsigned)> level, std::string label) {
  return ECode::sequence(std::move(label), [level = std::move(level)](unsigned n) {
    ECodePtr f = level(n + 2);
    if (!f) throw ProducerFailure("diagonal level " + std::to_string(n + 2) + " produced no code");
    return f->at(n + 2);
  });
}

Enumeration computable_closure(const Enumeration& alpha, std::shared_ptr<const CodeStore> store) {
  Enumeration e(alpha.name() + "_bar");
  add_base_sorts(e);
  e.set(Sort::real(), {[store](const Natural& k) { return store->contains(k) && store->validated(k); },
                       [store](const Natural& k) { return Value::real(Real(store->at(k))); }});
  e.set(Sort::interval(), {[store](const Natural& k) {
                             return store->contains(k) && store->validated(k) &&
                                    real_arith::make_interval(Real(store->at(k))).has_value();
                           },
                           [store](const Natural& k) { return Value::interval(Real(store->at(k))); }});
  return e;
}

TermCoding::TermCoding(const Signature& sig, const std::map<Sort, std::vector<std::string>>& generators) {
  for (const auto& [s, gens] : generators) {
    if (gens.empty()) throw InvalidCode("no generators for sort " + s.name());
    std::vector<std::string> list;
    for (const auto& g : gens) {
      const FuncSymbol& f = sig.at(g);
      if (f.arity() != 0 || f.result != s) throw InvalidCode("generator " + g + " is not a constant of sort " + s.name());
      list.push_back(g);
    }
    for (const auto& [name, f] : sig.symbols()) {
      if (f.conditional || f.result != s || f.arity() == 0) continue;
      if (std::all_of(f.args.begin(), f.args.end(), [&](const Sort& a) { return a == s; })) list.push_back(name);
    }
    for (const auto& name : list) arity_[name] = sig.at(name).arity();
    symbols_[s] = std::move(list);
  }
}

const std::vector<std::string>& TermCoding::symbols(const Sort& s) const {
  auto it = symbols_.find(s);
  if (it == symbols_.end()) throw InvalidCode("no term coding for sort " + s.name());
  return it->second;
}

ClosedTerm TermCoding::term(const Sort& s, const Natural& k) const {
  const auto& list = symbols(s);
  auto [a, r] = unpair(k);
  Natural pos = a % static_cast<unsigned long>(list.size());
  const std::string& name = list[pos.get_ui()];
  ClosedTerm t{name, {}};
  std::size_t m = arity_.at(name);
  Natural rest = r;
  for (std::size_t i = 0; i < m; ++i) {
    if (i + 1 == m) {
      t.args.push_back(term(s, rest));
    } else {
      auto [head, tail] = unpair(rest);
      t.args.push_back(term(s, head));
      rest = tail;
    }
  }
  return t;
}

Natural TermCoding::index(const Sort& s, const ClosedTerm& t) const {
  const auto& list = symbols(s);
  auto it = std::find(list.begin(), list.end(), t.symbol);
  if (it == list.end()) throw InvalidCode("symbol " + t.symbol + " is not coded at sort " + s.name());
  Natural pos(static_cast<unsigned long>(it - list.begin()));
  Natural args(0);
  if (!t.args.empty()) {
    args = index(s, t.args.back());
    for (std::size_t i = t.args.size() - 1; i-- > 0;) args = pair(index(s, t.args[i]), args);
  }
  return pair(pos, args);
}

namespace {

Verdict<Value> eval_term(const PartialAlgebra& a, const ClosedTerm& t, Fuel& fuel) {
  std::vector<Value> args;
  for (const auto& c : t.args) {
    auto v = eval_term(a, c, fuel);
    if (!v.converged()) return v;
    args.push_back(v.value());
  }
  return a.apply(t.symbol, args, fuel);
}

}  // namespace

Enumeration canonical_enum(const Signature& sig, std::shared_ptr<const PartialAlgebra> a,
                           const std::map<Sort, std::vector<std::string>>& generators, std::uint64_t fuel) {
  auto coding = std::make_shared<TermCoding>(sig, generators);
  Enumeration e("canonical");
  add_base_sorts(e);
  for (const auto& [s, gens] : generators) {
    Sort sort = s;
    auto evaluate = [coding, a, sort, fuel](const Natural& k) {
      Fuel f(fuel);
      auto v = eval_term(*a, coding->term(sort, k), f);
      if (v.fuel_exhausted()) throw PendingEvaluation("evaluation of term " + k.get_str() + " is pending");
      return v;
    };
    e.set(s, {[evaluate](const Natural& k) { return evaluate(k).converged(); },
              [evaluate](const Natural& k) { return evaluate(k).value(); }});
  }
  return e;
}

ECodePtr sqrt_code(const Rational& q) {
  if (q < 0) throw InvalidCode("sqrt of a negative rational");
  Rational hi0 = std::max(Rational(1), q);
  long width_bits = static_cast<long>(mpz_sizeinbase(hi0.get_num_mpz_t(), 2));
  return ECode::sequence("prog:sqrt:" + to_string(q), [q, hi0, width_bits](unsigned n) {
    Rational lo(0), hi = hi0;
    for (long j = 0; j < static_cast<long>(n) + 1 + width_bits; ++j) {
      Rational mid = (lo + hi) / 2;
      if (mid * mid <= q)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  });
}

ECodePtr exp_code(const Rational& q) {
  return ECode::sequence("prog:exp:" + to_string(q), [q](unsigned n) {
    const Rational aq = abs(q);
    const Rational target = pow2(-static_cast<long>(n) - 1);
    Rational sum(1), term(1);
    for (unsigned long i = 1;; ++i) {
      term = term * q / Rational(static_cast<long>(i));
      sum += term;
      // Remaining tail after index i is at most 2|term| once i + 2 >= 2|q|.
      Rational next = abs(term) * aq / Rational(static_cast<long>(i + 1));
      if (Rational(static_cast<long>(i + 2)) >= 2 * aq && 2 * next <= target) break;
    }
    return sum;
  });
}

CodeRegistry::CodeRegistry() {
  families_["sqrt"] = [](const std::string& arg) { return sqrt_code(parse_rational(arg)); };
  families_["exp"] = [](const std::string& arg) { return exp_code(parse_rational(arg)); };
  aliases_["sqrt2"] = "prog:sqrt:2";
  aliases_["e"] = "prog:exp:1";
}

CodeRegistry& CodeRegistry::instance() {
  static CodeRegistry registry;
  return registry;
}

void CodeRegistry::add_family(const std::string& id, Factory f) {
  std::lock_guard<std::mutex> lock(mu_);
  families_[id] = std::move(f);
}

void CodeRegistry::add_alias(const std::string& name, const std::string& serialized) {
  std::lock_guard<std::mutex> lock(mu_);
  aliases_[name] = serialized;
}

bool CodeRegistry::has_family(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return families_.count(id) > 0;
}

ECodePtr CodeRegistry::parse(const std::string& text) const {
  std::string s = text;
  Factory factory;
  std::string arg;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = aliases_.find(s); it != aliases_.end()) s = it->second;
    if (s.rfind("prog:", 0) == 0) {
      auto colon = s.find(':', 5);
      if (colon == std::string::npos) throw InvalidCode("malformed code '" + text + "'");
      std::string id = s.substr(5, colon - 5);
      auto it = families_.find(id);
      if (it == families_.end()) throw InvalidCode("unknown code family '" + id + "'");
      factory = it->second;
      arg = s.substr(colon + 1);
    }
  }
  try {
    if (factory) return factory(arg);
    if (s.rfind("const:", 0) == 0) return ECode::constant(parse_rational(s.substr(6)));
    return ECode::constant(parse_rational(s));
  } catch (const std::invalid_argument& e) {
    throw InvalidCode("malformed code '" + text + "': " + e.what());
  }
}

}  // namespace whilecc

#include "whilecc/algebra.hpp"

#include <algorithm>
#include <mutex>

namespace whilecc {

namespace {
constexpr std::uint64_t kConstantFuel = 1'000'000;
}

PartialAlgebra::PartialAlgebra(std::string name, Signature sig) : name_(std::move(name)), sig_(std::move(sig)) {}

void PartialAlgebra::define(const std::string& symbol, Op op) {
  if (!sig_.find(symbol)) throw AlgebraError("algebra " + name_ + " has no symbol " + symbol);
  ops_[symbol] = std::move(op);
}

void PartialAlgebra::define_metric(const Sort& s, Metric m) { metrics_[s] = std::move(m); }

Verdict<Value> PartialAlgebra::apply(const FuncSymbol& f, const std::vector<Value>& args, Fuel& fuel) const {
  if (args.size() != f.arity())
    throw AlgebraError("arity mismatch for " + f.name + ": expected " + std::to_string(f.arity()) + ", got " +
                       std::to_string(args.size()));
  auto it = ops_.find(f.name);
  if (it == ops_.end()) throw AlgebraError("algebra " + name_ + " does not interpret " + f.name);
  return it->second(args, fuel);
}

Verdict<Value> PartialAlgebra::apply(const std::string& symbol, const std::vector<Value>& args, Fuel& fuel) const {
  return apply(sig_.at(symbol), args, fuel);
}

Rational PartialAlgebra::metric(const Sort& s, const Value& x, const Value& y, unsigned n) const {
  auto it = metrics_.find(s);
  if (it == metrics_.end()) throw AlgebraError("sort " + s.name() + " has no metric in " + name_);
  return it->second(x, y, n);
}

namespace {

Value eval_closed(const PartialAlgebra& a, const ClosedTerm& t) {
  std::vector<Value> args;
  for (const auto& c : t.args) args.push_back(eval_closed(a, c));
  Fuel fuel(kConstantFuel);
  auto v = a.apply(t.symbol, args, fuel);
  if (!v.converged()) throw AlgebraError("closed term " + t.to_string() + " does not converge in " + a.name());
  return v.value();
}

}  // namespace

Value PartialAlgebra::default_value(const Sort& s) const { return eval_closed(*this, sig_.default_term(s)); }

Value PartialAlgebra::literal(const Sort& s, const Rational& q) const {
  if (literal_) return literal_(s, q);
  if (s.is_nat()) {
    if (q.get_den() != 1 || q < 0) throw AlgebraError("natural literal must be a nonnegative integer");
    return Value::nat(q.get_num());
  }
  // Numeral closed term: binary expansion over 0, 1, +, x, -, inv.
  const std::string t = s.tag();
  std::function<ClosedTerm(const mpz_class&)> numeral = [&](const mpz_class& n) -> ClosedTerm {
    if (n < 0) return {"neg_" + t, {numeral(-n)}};
    if (n == 0) return {"zero_" + t, {}};
    if (n == 1) return {"one_" + t, {}};
    ClosedTerm two{"add_" + t, {{"one_" + t, {}}, {"one_" + t, {}}}};
    ClosedTerm half{"mul_" + t, {two, numeral(n / 2)}};
    if (n % 2 == 0) return half;
    return {"add_" + t, {half, {"one_" + t, {}}}};
  };
  ClosedTerm term = numeral(q.get_num());
  if (q.get_den() != 1) term = {"mul_" + t, {term, {"inv_" + t, {numeral(q.get_den())}}}};
  return eval_closed(*this, term);
}

std::vector<std::string> PartialAlgebra::uncovered() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : sig_.symbols())
    if (!ops_.count(name)) out.push_back(name);
  return out;
}

Verdict<Value> apply(const PartialAlgebra& a, const FuncSymbol& f, const std::vector<Value>& args, Fuel& fuel) {
  return a.apply(f, args, fuel);
}

Rational product_metric(const PartialAlgebra& a, const std::vector<Sort>& u, const ValueTuple& x, const ValueTuple& y,
                        unsigned n) {
  if (x.size() != u.size() || y.size() != u.size()) throw AlgebraError("tuple does not match product type");
  Rational best(0);
  for (std::size_t i = 0; i < u.size(); ++i) best = std::max(best, a.metric(u[i], x[i], y[i], n));
  return best;
}

namespace algebra_parts {

void install_standard(PartialAlgebra& a) {
  const Signature& sig = a.signature();
  a.define("true", [](const std::vector<Value>&, Fuel&) -> Verdict<Value> { return Value::boolean(true); });
  a.define("false", [](const std::vector<Value>&, Fuel&) -> Verdict<Value> { return Value::boolean(false); });
  a.define("and", [](const std::vector<Value>& v, Fuel&) -> Verdict<Value> {
    return Value::boolean(v[0].as_bool() && v[1].as_bool());
  });
  a.define("or", [](const std::vector<Value>& v, Fuel&) -> Verdict<Value> {
    return Value::boolean(v[0].as_bool() || v[1].as_bool());
  });
  a.define("not", [](const std::vector<Value>& v, Fuel&) -> Verdict<Value> { return Value::boolean(!v[0].as_bool()); });
  for (const auto& [name, f] : sig.symbols())
    if (f.conditional)
      a.define(name, [](const std::vector<Value>& v, Fuel&) -> Verdict<Value> { return v[0].as_bool() ? v[1] : v[2]; });
}

void install_arrays(PartialAlgebra& a) {
  const Signature& sig = a.signature();
  const PartialAlgebra* self = &a;
  for (const auto& s : sig.sorts()) {
    if (!s.starred()) continue;
    const Sort e = s.element();
    auto size_of = [](const Natural& n) -> std::size_t {
      if (!n.fits_ulong_p() || n.get_ui() > (1UL << 28)) throw AlgebraError("array index too large");
      return n.get_ui();
    };
    a.define(sym::null(e), [e](const std::vector<Value>&, Fuel&) -> Verdict<Value> { return Value::array(e, {}); });
    a.define(sym::lgth(e), [](const std::vector<Value>& v, Fuel&) -> Verdict<Value> {
      return Value::nat(Natural(static_cast<unsigned long>(v[0].as_array().items->size())));
    });
    a.define(sym::ap(e), [self, e](const std::vector<Value>& v, Fuel&) -> Verdict<Value> {
      const auto& items = *v[0].as_array().items;
      const Natural& i = v[1].as_nat();
      if (i < static_cast<unsigned long>(items.size())) return items[i.get_ui()];
      return self->default_value(e);
    });
    a.define(sym::update(e), [](const std::vector<Value>& v, Fuel&) -> Verdict<Value> {
      const auto& arr = v[0].as_array();
      const Natural& i = v[1].as_nat();
      if (i >= static_cast<unsigned long>(arr.items->size())) return v[0];
      std::vector<Value> items = *arr.items;
      items[i.get_ui()] = v[2];
      return Value::array(arr.element, std::move(items));
    });
    a.define(sym::newlength(e), [self, e, size_of](const std::vector<Value>& v, Fuel&) -> Verdict<Value> {
      const auto& arr = v[0].as_array();
      std::size_t m = size_of(v[1].as_nat());
      std::vector<Value> items(arr.items->begin(), arr.items->begin() + std::min(m, arr.items->size()));
      if (items.size() < m) items.resize(m, self->default_value(e));
      return Value::array(arr.element, std::move(items));
    });
  }
}

void install_nat(PartialAlgebra& a) {
  using V = std::vector<Value>;
  const Signature& sig = a.signature();
  a.define("zero_nat", [](const V&, Fuel&) -> Verdict<Value> { return Value::nat(0); });
  a.define("S", [](const V& v, Fuel&) -> Verdict<Value> { return Value::nat(v[0].as_nat() + 1); });
  a.define("eq_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::boolean(v[0].as_nat() == v[1].as_nat()); });
  a.define("less_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::boolean(v[0].as_nat() < v[1].as_nat()); });
  if (sig.find("add_nat"))
    a.define("add_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::nat(v[0].as_nat() + v[1].as_nat()); });
  if (sig.find("mul_nat"))
    a.define("mul_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::nat(v[0].as_nat() * v[1].as_nat()); });
  if (sig.find("monus_nat"))
    a.define("monus_nat", [](const V& v, Fuel&) -> Verdict<Value> {
      return Value::nat(v[0].as_nat() > v[1].as_nat() ? Natural(v[0].as_nat() - v[1].as_nat()) : Natural(0));
    });
  if (sig.find("pair_nat"))
    a.define("pair_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::nat(pair(v[0].as_nat(), v[1].as_nat())); });
  if (sig.find("pi1_nat"))
    a.define("pi1_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::nat(unpair(v[0].as_nat()).first); });
  if (sig.find("pi2_nat"))
    a.define("pi2_nat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::nat(unpair(v[0].as_nat()).second); });
}

void install_discrete_and_array_metrics(PartialAlgebra& a) {
  const Signature& sig = a.signature();
  if (sig.has_sort(Sort::boolean()))
    a.define_metric(Sort::boolean(), [](const Value& x, const Value& y, unsigned) {
      return Rational(x.as_bool() == y.as_bool() ? 0 : 1);
    });
  if (sig.has_sort(Sort::nat()))
    a.define_metric(Sort::nat(), [](const Value& x, const Value& y, unsigned) {
      return Rational(x.as_nat() == y.as_nat() ? 0 : 1);
    });
  const PartialAlgebra* self = &a;
  for (const auto& s : sig.sorts()) {
    if (!s.starred()) continue;
    const Sort e = s.element();
    a.define_metric(s, [self, e](const Value& x, const Value& y, unsigned n) {
      const auto& xs = *x.as_array().items;
      const auto& ys = *y.as_array().items;
      if (xs.size() != ys.size()) return Rational(1);
      Rational best(0);
      for (std::size_t i = 0; i < xs.size(); ++i) best = std::max(best, self->metric(e, xs[i], ys[i], n));
      return std::min(best, Rational(1));
    });
  }
}

void add_nat_extras(Signature& sig) {
  const Sort n = Sort::nat();
  sig.add_symbol({"add_nat", "add", {n, n}, n});
  sig.add_symbol({"mul_nat", "mul", {n, n}, n});
  sig.add_symbol({"monus_nat", "monus", {n, n}, n});
  sig.add_symbol({"pair_nat", "pair", {n, n}, n});
  sig.add_symbol({"pi1_nat", "pi1", {n}, n});
  sig.add_symbol({"pi2_nat", "pi2", {n}, n});
}

void add_real_extras(Signature& sig) {
  const Sort r = Sort::real();
  const Sort n = Sort::nat();
  sig.add_symbol({"rat", "rat", {n}, r});
  sig.add_symbol({"i_N", "i_N", {n}, r});
  sig.add_symbol({"dist_real", "dist", {r, r}, r});
}

void add_horner(Signature& sig) {
  sig.add_symbol({"horner", "horner", {Sort::real().star(), Sort::real()}, Sort::real()});
}

}  // namespace algebra_parts

}  // namespace whilecc

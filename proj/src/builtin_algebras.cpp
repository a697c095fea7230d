#include <mutex>

#include "whilecc/algebra.hpp"
#include "whilecc/real_arith.hpp"

namespace whilecc {

namespace {

using V = std::vector<Value>;
namespace ra = real_arith;
namespace parts = algebra_parts;

Signature reals_user_signature(bool with_interval) {
  Signature sig;
  const Sort r = Sort::real();
  sig.add_sort(r, {"zero_real", {}});
  sig.add_symbol({"zero_real", "zero", {}, r});
  sig.add_symbol({"one_real", "one", {}, r});
  sig.add_symbol({"add_real", "add", {r, r}, r});
  sig.add_symbol({"mul_real", "mul", {r, r}, r});
  sig.add_symbol({"neg_real", "neg", {r}, r});
  sig.add_symbol({"inv_real", "inv", {r}, r, true});
  sig.declare_equality(r);
  sig.declare_order(r);
  if (with_interval) {
    const Sort i = Sort::interval();
    sig.add_sort(i, {"zero_interval", {}});
    sig.add_symbol({"zero_interval", "zero", {}, i});
    sig.add_symbol({"i_I", "i_I", {i}, r});
  }
  return sig;
}

void mark_partial(Signature& sig) {
  // eq/less on reals are partial identities.
  for (const char* name : {"eq_real", "less_real"})
    if (sig.find(name)) sig.mark_partial(name);
}

Verdict<Value> wrap_bool(const Verdict<bool>& b) {
  if (b.converged()) return Value::boolean(b.value());
  return b.divergence<Value>();
}

void install_reals(PartialAlgebra& a) {
  const Signature& sig = a.signature();
  a.define("zero_real", [](const V&, Fuel&) -> Verdict<Value> { return Value::real(Rational(0)); });
  a.define("one_real", [](const V&, Fuel&) -> Verdict<Value> { return Value::real(Rational(1)); });
  a.define("add_real", [](const V& v, Fuel&) -> Verdict<Value> {
    return Value::real(ra::add(v[0].as_real(), v[1].as_real()));
  });
  a.define("mul_real", [](const V& v, Fuel&) -> Verdict<Value> {
    return Value::real(ra::mul(v[0].as_real(), v[1].as_real()));
  });
  a.define("neg_real", [](const V& v, Fuel&) -> Verdict<Value> { return Value::real(ra::neg(v[0].as_real())); });
  a.define("inv_real", [](const V& v, Fuel& fuel) -> Verdict<Value> {
    auto r = ra::inv(v[0].as_real(), fuel);
    if (!r.converged()) return r.divergence<Value>();
    return Value::real(r.value());
  });
  a.define("eq_real", [](const V& v, Fuel& fuel) { return wrap_bool(ra::eq(v[0].as_real(), v[1].as_real(), fuel)); });
  a.define("less_real",
           [](const V& v, Fuel& fuel) { return wrap_bool(ra::less(v[0].as_real(), v[1].as_real(), fuel)); });
  if (sig.find("rat"))
    a.define("rat", [](const V& v, Fuel&) -> Verdict<Value> { return Value::real(Real(rat_decode(v[0].as_nat()))); });
  if (sig.find("i_N"))
    a.define("i_N", [](const V& v, Fuel&) -> Verdict<Value> { return Value::real(Real(Rational(v[0].as_nat()))); });
  if (sig.find("dist_real"))
    a.define("dist_real", [](const V& v, Fuel&) -> Verdict<Value> {
      return Value::real(ra::dist(v[0].as_real(), v[1].as_real()));
    });
  if (sig.find("zero_interval")) {
    a.define("zero_interval", [](const V&, Fuel&) -> Verdict<Value> { return Value::interval(Rational(0)); });
    a.define("i_I", [](const V& v, Fuel&) -> Verdict<Value> { return Value::real(v[0].as_interval()); });
    a.define_metric(Sort::interval(), [](const Value& x, const Value& y, unsigned n) {
      return ra::distance(x.as_interval(), y.as_interval(), n);
    });
  }
  a.define_metric(Sort::real(),
                  [](const Value& x, const Value& y, unsigned n) { return ra::distance(x.as_real(), y.as_real(), n); });
  a.set_literal([](const Sort& s, const Rational& q) -> Value {
    if (s.is_nat()) {
      if (q.get_den() != 1 || q < 0) throw AlgebraError("natural literal must be a nonnegative integer");
      return Value::nat(q.get_num());
    }
    if (s == Sort::real()) return Value::real(Real(q));
    throw AlgebraError("no numerals of sort " + s.name());
  });
}

std::shared_ptr<PartialAlgebra> make_real_algebra(const std::string& name, bool n_standard, bool with_interval) {
  Signature sig = standardise(reals_user_signature(with_interval));
  if (n_standard) {
    sig = n_standardise(sig);
    parts::add_nat_extras(sig);
    parts::add_real_extras(sig);
  }
  mark_partial(sig);
  auto a = std::make_shared<PartialAlgebra>(name, std::move(sig));
  parts::install_standard(*a);
  if (n_standard) parts::install_nat(*a);
  install_reals(*a);
  parts::install_discrete_and_array_metrics(*a);
  return a;
}

}  // namespace

std::shared_ptr<PartialAlgebra> builtin_B() {
  auto a = std::make_shared<PartialAlgebra>("B", standardise(Signature{}));
  parts::install_standard(*a);
  parts::install_discrete_and_array_metrics(*a);
  a->set_total(true);
  return a;
}

std::shared_ptr<PartialAlgebra> builtin_N() {
  Signature sig = n_standardise(standardise(Signature{}));
  parts::add_nat_extras(sig);
  auto a = std::make_shared<PartialAlgebra>("N", std::move(sig));
  parts::install_standard(*a);
  parts::install_nat(*a);
  parts::install_discrete_and_array_metrics(*a);
  a->set_total(true);
  return a;
}

std::shared_ptr<PartialAlgebra> builtin_R() { return make_real_algebra("R", false, false); }
std::shared_ptr<PartialAlgebra> builtin_R_N() { return make_real_algebra("RN", true, false); }
std::shared_ptr<PartialAlgebra> builtin_interval() { return make_real_algebra("IN", true, true); }

std::shared_ptr<PartialAlgebra> star_algebra(const PartialAlgebra& base) {
  Signature sig = star_signature(base.signature());
  const bool reals = base.signature().find("add_real") && base.signature().find("mul_real");
  if (reals) parts::add_horner(sig);
  auto a = std::make_shared<PartialAlgebra>(base.name() + "*", std::move(sig));
  for (const auto& [name, op] : base.ops())
    if (!base.signature().at(name).conditional) a->define(name, op);
  for (const auto& [s, m] : base.metrics())
    if (!s.starred()) a->define_metric(s, m);
  if (base.literal_rule()) a->set_literal(base.literal_rule());
  parts::install_standard(*a);
  parts::install_arrays(*a);
  parts::install_discrete_and_array_metrics(*a);
  for (const auto& [s, m] : base.metrics())
    if (!s.starred()) a->define_metric(s, m);
  if (reals) {
    a->define("horner", [](const V& v, Fuel&) -> Verdict<Value> {
      std::vector<Real> coeffs;
      for (const auto& c : *v[0].as_array().items) coeffs.push_back(c.as_real());
      return Value::real(ra::horner(coeffs, v[1].as_real()));
    });
  }
  a->set_total(base.total());
  return a;
}

std::shared_ptr<PartialAlgebra> builtin_algebra(const std::string& name) {
  bool star = !name.empty() && name.back() == '*';
  std::string base = star ? name.substr(0, name.size() - 1) : name;
  std::shared_ptr<PartialAlgebra> a;
  if (base == "B")
    a = builtin_B();
  else if (base == "N")
    a = builtin_N();
  else if (base == "R")
    a = builtin_R();
  else if (base == "RN")
    a = builtin_R_N();
  else if (base == "IN")
    a = builtin_interval();
  else
    throw AlgebraError("unknown algebra '" + name + "'");
  if (!star) return a;
  if (!a->signature().n_standard()) throw AlgebraError("algebra " + base + " is not N-standard and cannot be starred");
  return star_algebra(*a);
}

AlgebraPtr shared_builtin(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, AlgebraPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  AlgebraPtr a = builtin_algebra(name);
  cache.emplace(name, a);
  return a;
}

}  // namespace whilecc

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "whilecc/signature.hpp"
#include "whilecc/value.hpp"
#include "whilecc/verdict.hpp"

namespace whilecc {

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A many-sorted partial algebra: an interpretation rule per symbol, plus
// per-sort metrics. Immutable once built; apply is re-entrant.
class PartialAlgebra {
 public:
  using Op = std::function<Verdict<Value>(const std::vector<Value>&, Fuel&)>;
  // Rational within 2^-n of d(x, y).
  using Metric = std::function<Rational(const Value&, const Value&, unsigned)>;
  using Literal = std::function<Value(const Sort&, const Rational&)>;

  PartialAlgebra(std::string name, Signature sig);
  PartialAlgebra(const PartialAlgebra&) = delete;
  PartialAlgebra& operator=(const PartialAlgebra&) = delete;

  const std::string& name() const { return name_; }
  const Signature& signature() const { return sig_; }
  bool total() const { return total_; }

  void define(const std::string& symbol, Op op);
  void define_metric(const Sort& s, Metric m);
  void set_literal(Literal lit) { literal_ = std::move(lit); }
  void set_total(bool t) { total_ = t; }

  Verdict<Value> apply(const FuncSymbol& f, const std::vector<Value>& args, Fuel& fuel) const;
  Verdict<Value> apply(const std::string& symbol, const std::vector<Value>& args, Fuel& fuel) const;

  bool has_metric(const Sort& s) const { return metrics_.count(s) > 0; }
  Rational metric(const Sort& s, const Value& x, const Value& y, unsigned n) const;

  Value default_value(const Sort& s) const;
  // Value of the numeral closed term for q at sort s.
  Value literal(const Sort& s, const Rational& q) const;

  // Rules are expected not to capture the algebra they came from, except
  // through install_arrays / install_discrete_and_array_metrics.
  const std::map<std::string, Op>& ops() const { return ops_; }
  const std::map<Sort, Metric>& metrics() const { return metrics_; }
  const Literal& literal_rule() const { return literal_; }

  // Symbols with no interpretation rule.
  std::vector<std::string> uncovered() const;

 private:
  std::string name_;
  Signature sig_;
  std::map<std::string, Op> ops_;
  std::map<Sort, Metric> metrics_;
  Literal literal_;
  bool total_ = false;
};

using AlgebraPtr = std::shared_ptr<const PartialAlgebra>;

Verdict<Value> apply(const PartialAlgebra& a, const FuncSymbol& f, const std::vector<Value>& args, Fuel& fuel);

std::shared_ptr<PartialAlgebra> builtin_B();
std::shared_ptr<PartialAlgebra> builtin_N();
std::shared_ptr<PartialAlgebra> builtin_R();
std::shared_ptr<PartialAlgebra> builtin_R_N();
std::shared_ptr<PartialAlgebra> builtin_interval();
// Adds array sorts and operations; when `a` has the ring of reals, also the
// polynomial evaluation symbol horner: real* x real -> real.
std::shared_ptr<PartialAlgebra> star_algebra(const PartialAlgebra& a);
// "B", "N", "R", "RN", "IN", optionally suffixed with "*".
std::shared_ptr<PartialAlgebra> builtin_algebra(const std::string& name);
// Process-wide shared instance of builtin_algebra(name).
AlgebraPtr shared_builtin(const std::string& name);

// Max over components of the per-sort metric approximations.
Rational product_metric(const PartialAlgebra& a, const std::vector<Sort>& u, const ValueTuple& x, const ValueTuple& y,
                        unsigned n);

// Shared pieces used when assembling algebras over other carriers.
namespace algebra_parts {
// Boolean operations and if_s for every sort of the signature.
void install_standard(PartialAlgebra& a);
// Array operations for every starred sort; uses a.default_value for padding.
void install_arrays(PartialAlgebra& a);
// Nat basics and the primitive recursive extras, when present.
void install_nat(PartialAlgebra& a);
// Discrete metric on bool and nat; d* on starred sorts from element metrics.
void install_discrete_and_array_metrics(PartialAlgebra& a);
// Signature extensions shared by builtins and code algebras.
void add_nat_extras(Signature& sig);
void add_real_extras(Signature& sig);
void add_horner(Signature& sig);
}  // namespace algebra_parts

}  // namespace whilecc

#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "whilecc/ecode.hpp"
#include "whilecc/numeric.hpp"
#include "whilecc/signature.hpp"

namespace whilecc {

// A computable real: an exact rational, or an e-code.
class Real {
 public:
  Real() : v_(Rational(0)) {}
  Real(const Rational& q);  // NOLINT(google-explicit-constructor)
  Real(ECodePtr e);         // NOLINT(google-explicit-constructor)

  bool is_exact() const { return std::holds_alternative<Rational>(v_); }
  const Rational& exact() const { return std::get<Rational>(v_); }
  // Constant code for exact values.
  ECodePtr code() const;
  // A rational within 2^-n of the value.
  Rational approx(unsigned n) const;
  std::string describe() const;

  bool identical(const Real& o) const;

 private:
  std::variant<Rational, ECodePtr> v_;
};

class Value;

struct IntervalValue {
  Real x;  // certified to lie in [0,1] when constructed through make_interval
};

struct ArrayValue {
  Sort element;
  std::shared_ptr<const std::vector<Value>> items;
};

// Carrier element of a code algebra: an index into an enumeration.
struct CodeValue {
  Natural index;
};

class Value {
 public:
  Value() : v_(false) {}
  static Value boolean(bool b) { return Value(Rep(b)); }
  static Value nat(Natural n) { return Value(Rep(std::move(n))); }
  static Value real(Real r) { return Value(Rep(std::move(r))); }
  static Value interval(Real r) { return Value(Rep(IntervalValue{std::move(r)})); }
  static Value array(const Sort& element, std::vector<Value> items);
  static Value code(Natural index) { return Value(Rep(CodeValue{std::move(index)})); }

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_nat() const { return std::holds_alternative<Natural>(v_); }
  bool is_real() const { return std::holds_alternative<Real>(v_); }
  bool is_interval() const { return std::holds_alternative<IntervalValue>(v_); }
  bool is_array() const { return std::holds_alternative<ArrayValue>(v_); }
  bool is_code() const { return std::holds_alternative<CodeValue>(v_); }

  bool as_bool() const;
  const Natural& as_nat() const;
  const Real& as_real() const;
  const Real& as_interval() const;
  const ArrayValue& as_array() const;
  const Natural& as_code() const;

  // Structural identity (e-codes by pointer); used for outcome-set dedup.
  bool identical(const Value& o) const;
  std::string to_string() const;

 private:
  using Rep = std::variant<bool, Natural, Real, IntervalValue, ArrayValue, CodeValue>;
  explicit Value(Rep r) : v_(std::move(r)) {}
  Rep v_;
};

using ValueTuple = std::vector<Value>;

bool identical(const ValueTuple& a, const ValueTuple& b);
std::string to_string(const ValueTuple& t);

}  // namespace whilecc

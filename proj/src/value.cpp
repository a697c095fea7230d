#include "whilecc/value.hpp"

#include <stdexcept>

namespace whilecc {

Real::Real(const Rational& q) : v_(q) { std::get<Rational>(v_).canonicalize(); }

Real::Real(ECodePtr e) {
  if (!e) throw std::invalid_argument("null e-code");
  if (e->exact())
    v_ = *e->exact();
  else
    v_ = std::move(e);
}

ECodePtr Real::code() const {
  if (is_exact()) return ECode::constant(exact());
  return std::get<ECodePtr>(v_);
}

Rational Real::approx(unsigned n) const {
  if (is_exact()) return exact();
  return std::get<ECodePtr>(v_)->at(n);
}

std::string Real::describe() const {
  if (is_exact()) return to_string(exact());
  return std::get<ECodePtr>(v_)->describe();
}

bool Real::identical(const Real& o) const {
  if (is_exact() != o.is_exact()) return false;
  if (is_exact()) return exact() == o.exact();
  return std::get<ECodePtr>(v_) == std::get<ECodePtr>(o.v_);
}

Value Value::array(const Sort& element, std::vector<Value> items) {
  return Value(Rep(ArrayValue{element, std::make_shared<const std::vector<Value>>(std::move(items))}));
}

namespace {
[[noreturn]] void wrong(const char* want, const Value& v) {
  throw std::logic_error(std::string("expected ") + want + " value, got " + v.to_string());
}
}  // namespace

bool Value::as_bool() const {
  if (!is_bool()) wrong("bool", *this);
  return std::get<bool>(v_);
}
const Natural& Value::as_nat() const {
  if (!is_nat()) wrong("nat", *this);
  return std::get<Natural>(v_);
}
const Real& Value::as_real() const {
  if (!is_real()) wrong("real", *this);
  return std::get<Real>(v_);
}
const Real& Value::as_interval() const {
  if (!is_interval()) wrong("interval", *this);
  return std::get<IntervalValue>(v_).x;
}
const ArrayValue& Value::as_array() const {
  if (!is_array()) wrong("array", *this);
  return std::get<ArrayValue>(v_);
}
const Natural& Value::as_code() const {
  if (!is_code()) wrong("code", *this);
  return std::get<CodeValue>(v_).index;
}

bool Value::identical(const Value& o) const {
  if (v_.index() != o.v_.index()) return false;
  if (is_bool()) return as_bool() == o.as_bool();
  if (is_nat()) return as_nat() == o.as_nat();
  if (is_real()) return as_real().identical(o.as_real());
  if (is_interval()) return as_interval().identical(o.as_interval());
  if (is_code()) return as_code() == o.as_code();
  const auto& a = as_array();
  const auto& b = o.as_array();
  if (a.element != b.element || a.items->size() != b.items->size()) return false;
  for (std::size_t i = 0; i < a.items->size(); ++i)
    if (!(*a.items)[i].identical((*b.items)[i])) return false;
  return true;
}

std::string Value::to_string() const {
  if (is_bool()) return as_bool() ? "true" : "false";
  if (is_nat()) return as_nat().get_str();
  if (is_real()) return as_real().describe();
  if (is_interval()) return "interval(" + as_interval().describe() + ")";
  if (is_code()) return "#" + as_code().get_str();
  const auto& a = as_array();
  std::string out = "[";
  for (std::size_t i = 0; i < a.items->size(); ++i) out += (i ? ", " : "") + (*a.items)[i].to_string();
  return out + "]";
}

bool identical(const ValueTuple& a, const ValueTuple& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].identical(b[i])) return false;
  return true;
}

std::string to_string(const ValueTuple& t) {
  if (t.size() == 1) return t[0].to_string();
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + t[i].to_string();
  return out + ")";
}

}  // namespace whilecc

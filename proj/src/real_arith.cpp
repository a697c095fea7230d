#include "whilecc/real_arith.hpp"

namespace whilecc::real_arith {

Real add(const Real& x, const Real& y) {
  if (x.is_exact() && y.is_exact()) return Real(Rational(x.exact() + y.exact()));
  return Real(ECode::sum(x.code(), y.code()));
}

Real neg(const Real& x) {
  if (x.is_exact()) return Real(Rational(-x.exact()));
  return Real(ECode::negate(x.code()));
}

Real mul(const Real& x, const Real& y) {
  if (x.is_exact() && y.is_exact()) return Real(Rational(x.exact() * y.exact()));
  return Real(ECode::product(x.code(), y.code()));
}

Real dist(const Real& x, const Real& y) {
  if (x.is_exact() && y.is_exact()) return Real(abs(Rational(x.exact() - y.exact())));
  return Real(ECode::absolute(ECode::sum(x.code(), ECode::negate(y.code()))));
}

Verdict<Real> inv(const Real& x, Fuel& fuel) {
  if (x.is_exact()) {
    if (x.exact() == 0) return ProvenDivergent{};
    return Real(Rational(1 / x.exact()));
  }
  for (unsigned n = 0; n <= kRefineCap; ++n) {
    if (!fuel.consume()) return FuelExhausted{};
    if (abs(x.approx(n)) > pow2(-static_cast<long>(n))) return Real(ECode::reciprocal(x.code()));
  }
  return FuelExhausted{};
}

Verdict<bool> less(const Real& x, const Real& y, Fuel& fuel) {
  if (x.is_exact() && y.is_exact()) {
    if (x.exact() < y.exact()) return true;
    if (x.exact() > y.exact()) return false;
    return FuelExhausted{};
  }
  for (unsigned n = 0; n <= kRefineCap; ++n) {
    if (!fuel.consume()) return FuelExhausted{};
    const Rational e = pow2(-static_cast<long>(n));
    const Rational a = x.approx(n);
    const Rational b = y.approx(n);
    if (a + e < b - e) return true;
    if (b + e < a - e) return false;
  }
  return FuelExhausted{};
}

Verdict<bool> eq(const Real& x, const Real& y, Fuel& fuel) {
  if (x.is_exact() && y.is_exact()) {
    if (x.exact() != y.exact()) return false;
    return FuelExhausted{};
  }
  Verdict<bool> l = less(x, y, fuel);
  if (!l.converged()) return l;
  return false;
}

Real horner(const std::vector<Real>& coeffs, const Real& x) {
  Real acc(Rational(0));
  for (const auto& a : coeffs) acc = add(mul(acc, x), a);
  return acc;
}

Rational distance(const Real& x, const Real& y, unsigned n) {
  if (x.is_exact() && y.is_exact()) return abs(Rational(x.exact() - y.exact()));
  return abs(Rational(x.approx(n + 1) - y.approx(n + 1)));
}

std::optional<Real> make_interval(const Real& x) {
  if (x.is_exact()) {
    if (x.exact() < 0 || x.exact() > 1) return std::nullopt;
    return x;
  }
  constexpr unsigned kSlack = 20;
  for (unsigned n = 0; n <= kSlack; ++n) {
    const Rational e = pow2(-static_cast<long>(n));
    const Rational a = x.approx(n);
    if (a + e < 0 || a - e > 1) return std::nullopt;
    if (n == kSlack) {
      if (a < -e || a > 1 + e) return std::nullopt;
      return x;
    }
  }
  return std::nullopt;
}

}  // namespace whilecc::real_arith

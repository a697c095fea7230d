#pragma once

#include <optional>
#include <vector>

#include "whilecc/value.hpp"
#include "whilecc/verdict.hpp"

namespace whilecc::real_arith {

// Refinement depth at which an undecided comparison gives up (FuelExhausted).
inline constexpr unsigned kRefineCap = 256;

Real add(const Real& x, const Real& y);
Real neg(const Real& x);
Real mul(const Real& x, const Real& y);
Real dist(const Real& x, const Real& y);
// ProvenDivergent at exact 0; otherwise refines until |x| is separated from 0.
Verdict<Real> inv(const Real& x, Fuel& fuel);
// tt if x<y, ff if x>y, never decided when x = y.
Verdict<bool> less(const Real& x, const Real& y, Fuel& fuel);
// ff if x != y, never decided when x = y.
Verdict<bool> eq(const Real& x, const Real& y, Fuel& fuel);
// Coefficients highest degree first: p = (a_0, ..., a_{n-1}) means sum a_i X^{n-1-i}.
Real horner(const std::vector<Real>& coeffs, const Real& x);
// Rational within 2^-n of |x - y|.
Rational distance(const Real& x, const Real& y, unsigned n);

// Certificate for membership in [0,1]: rejects values provably outside, accepts
// once the value is within 2^-20 of the interval.
std::optional<Real> make_interval(const Real& x);

}  // namespace whilecc::real_arith

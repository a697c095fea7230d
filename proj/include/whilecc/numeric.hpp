#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace whilecc {

using Natural = mpz_class;
using Rational = mpq_class;

// Cantor pairing <a,b> = (a+b)(a+b+1)/2 + b.
Natural pair(const Natural& a, const Natural& b);
std::pair<Natural, Natural> unpair(const Natural& z);

// Integer <-> natural zigzag: 0,-1,1,-2,2,... <-> 0,1,2,3,4,...
Natural zigzag_encode(const mpz_class& v);
mpz_class zigzag_decode(const Natural& k);

// Canonical enumeration of Q: k -> (a, q) = unpair(k), value zigzag(a)/(q+1)
// in lowest terms. rat_index gives the least index of each rational.
Rational rat_decode(const Natural& k);
Natural rat_index(const Rational& r);

// 2^e for any signed exponent.
Rational pow2(long e);

// Nearest multiple of 2^-bits (ties toward +inf).
Rational round_to_grid(const Rational& x, long bits);
// Smallest multiple of 2^-bits that is >= x.
Rational ceil_to_grid(const Rational& x, long bits);

Rational abs(const Rational& x);
Rational make_rational(long num, long den = 1);

// "p/q" (or "p" when q = 1).
std::string to_string(const Rational& q);
// Truncated decimal with the given number of fraction digits.
std::string to_decimal(const Rational& q, int digits);
// Accepts "p", "-p", "p/q", and finite decimals like "3.5".
Rational parse_rational(std::string_view text);

std::size_t bit_size(const Rational& q);

// splitmix64 step; used for reproducible seeded choice.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace whilecc

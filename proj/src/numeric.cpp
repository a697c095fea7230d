#include "whilecc/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace whilecc {

Natural pair(const Natural& a, const Natural& b) {
  Natural w = a + b;
  Natural t = w * (w + 1) / 2;
  return t + b;
}

std::pair<Natural, Natural> unpair(const Natural& z) {
  if (z < 0) throw std::invalid_argument("unpair of negative integer");
  if (z.fits_ulong_p() && z.get_ui() < (1UL << 60)) {
    const unsigned long zi = z.get_ui();
    unsigned long s = static_cast<unsigned long>(std::sqrt(static_cast<double>(8 * zi + 1)));
    while (s * s > 8 * zi + 1) --s;
    while ((s + 1) * (s + 1) <= 8 * zi + 1) ++s;
    const unsigned long w = (s - 1) / 2, b = zi - w * (w + 1) / 2;
    return {Natural(w - b), Natural(b)};
  }
  Natural disc = 8 * z + 1;
  Natural s;
  mpz_sqrt(s.get_mpz_t(), disc.get_mpz_t());
  Natural w = (s - 1) / 2;
  Natural t = w * (w + 1) / 2;
  Natural b = z - t;
  return {w - b, b};
}

Natural zigzag_encode(const mpz_class& v) {
  if (v >= 0) return 2 * v;
  return -2 * v - 1;
}

mpz_class zigzag_decode(const Natural& k) {
  if (mpz_even_p(k.get_mpz_t())) return k / 2;
  return -((k + 1) / 2);
}

Rational rat_decode(const Natural& k) {
  auto [a, q] = unpair(k);
  Rational r(zigzag_decode(a), q + 1);
  r.canonicalize();
  return r;
}

Natural rat_index(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return pair(zigzag_encode(c.get_num()), Natural(c.get_den() - 1));
}

Rational pow2(long e) {
  Rational r(1);
  if (e >= 0) {
    mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return r;
}

namespace {

// floor(x * 2^bits + offset) as an integer.
mpz_class scaled_floor(const Rational& x, long bits, const Rational& offset) {
  Rational s = x * pow2(bits) + offset;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  return f;
}

}  // namespace

Rational round_to_grid(const Rational& x, long bits) {
  Rational r(scaled_floor(x, bits, Rational(1, 2)));
  r *= pow2(-bits);
  r.canonicalize();
  return r;
}

Rational ceil_to_grid(const Rational& x, long bits) {
  Rational s = x * pow2(bits);
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  Rational r(c);
  r *= pow2(-bits);
  r.canonicalize();
  return r;
}

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_decimal(const Rational& q, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Rational a = abs(q) * Rational(scale);
  mpz_class t;
  mpz_tdiv_q(t.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  std::string s = t.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
  std::string out = (q < 0 ? "-" : "") + s.substr(0, s.size() - static_cast<std::size_t>(digits));
  if (digits > 0) out += "." + s.substr(s.size() - static_cast<std::size_t>(digits));
  return out;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = s.find('.');
  Rational r;
  try {
    if (dot != std::string::npos) {
      std::string frac = s.substr(dot + 1);
      std::string whole = s.substr(0, dot);
      bool neg = !whole.empty() && whole[0] == '-';
      if (neg) whole.erase(0, 1);
      if (whole.empty()) whole = "0";
      if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos ||
          whole.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad decimal literal: " + s);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
      r = Rational(mpz_class(whole + frac, 10), den);
      if (neg) r = -r;
    } else {
      r = Rational(s, 10);
    }
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

std::size_t bit_size(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace whilecc

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "whilecc/interp.hpp"
#include "whilecc/lang.hpp"

namespace whilecc {

struct StdlibEntry {
  enum class Contract { Single, Multi, Exact };

  std::string name;
  std::string file;
  std::string source;
  std::string algebra;
  std::string procedure;
  Contract contract = Contract::Single;
  std::string oracle;
  // Position of the precision input n, if the program is precision-indexed.
  std::optional<std::size_t> precision_input;
  bool paper_example = false;
  std::string summary;

  Program parse() const;
};

// The core example programs: pivot, exp_approx, choose_near,
// root_bisect.
const std::vector<StdlibEntry>& stdlib();
// Further fixtures: root_bisect_fa and the three choose-elimination programs.
const std::vector<StdlibEntry>& fixtures();
// Looks in stdlib() then fixtures(); throws std::out_of_range.
const StdlibEntry& program_entry(const std::string& name);
// Replaces the bisection window W (default 8) in a root_bisect source.
std::string with_window(const std::string& source, const Rational& W);

// A rational ball {center, radius}.
struct Enclosure {
  Rational center;
  Rational radius;
};

// Enclosure of a nat, bool, real or interval value to 2^-bits.
std::optional<Enclosure> enclose_value(const Value& v, unsigned bits);
// Upper bound on the distance between anything in a and anything in b.
Rational deviation_bound(const Enclosure& a, const Enclosure& b);

namespace oracles {

// sum_{i=0}^{2^(n+1)} x^i / i!
Rational exp_partial_sum(const Rational& x, unsigned n);
// e^x to within 2^-bits (213 bits is 64 decimal digits).
Enclosure exp_value(const Rational& x, unsigned bits = 213);
// {i : x_i != 0}, 1-based.
std::vector<unsigned> pivot_set(const std::vector<Rational>& x);
// Leading coefficient first.
Rational polynomial(const std::vector<Rational>& coeffs, const Rational& x);
// c + x - |x + 1| + |x - 1|
Rational f_family(const Rational& c, const Rational& x);
// Sign changes of f on a 2^-grid_bits grid over [lo, hi], each refined by
// exact bisection to width 2^-bits. Roots closer than the grid step merge.
std::vector<Enclosure> sign_change_roots(const std::function<Rational(const Rational&)>& f, const Rational& lo,
                                         const Rational& hi, unsigned grid_bits, unsigned bits);
// f has a zero or changes sign between neighbours of a 2^grid_bits-cell grid
// over [v - r, v + r].
bool brackets_root(const std::function<Rational(const Rational&)>& f, const Rational& v, const Rational& r,
                   unsigned grid_bits = 10);

Natural least_divisor(const Natural& n);
Natural isqrt(const Natural& n);
std::pair<Natural, Natural> ackermann_toy(const Natural& n);

}  // namespace oracles

// Oracles take the inputs without the precision input. A single-valued
// oracle gives one enclosure per output, or nothing outside dom(F); a
// many-valued one gives the finite target set.
using SingleOracle = std::function<std::optional<std::vector<Enclosure>>(const ValueTuple&, unsigned bits)>;
using MultiOracle = std::function<std::vector<std::vector<Enclosure>>(const ValueTuple&, unsigned bits)>;

// Named oracles as referenced from the manifest; throws std::out_of_range.
SingleOracle single_oracle(const std::string& name);
MultiOracle multi_oracle(const std::string& name);
bool known_oracle(const std::string& name);

struct ApproxOptions {
  std::vector<ChoiceStrategy> strategies{ChoiceStrategy::dovetail()};
  std::uint64_t fuel = 1'000'000;
  std::optional<std::size_t> precision_input = 0;
  // Single-valued: also require {undefined} outside dom(F).
  bool strict = false;
};

struct ApproxReport {
  struct Cell {
    ValueTuple input;
    unsigned n = 0;
    std::string strategy;
    ResultSet outcome;
    std::vector<std::vector<Enclosure>> oracle;
    Rational max_deviation;  // exact bound over the outcome set
    bool pass = false;
    std::string detail;
  };
  // Many-valued coverage: targets within 2^-n of some output, pooled over
  // strategies.
  struct Coverage {
    ValueTuple input;
    unsigned n = 0;
    std::size_t targets = 0;
    std::size_t covered = 0;
    std::size_t distinct_outputs = 0;
  };
  std::string program;
  std::vector<Cell> cells;
  std::vector<Coverage> coverage;
  std::string scope = "verified on samples";

  bool passed() const;
  std::size_t failures() const;
  std::vector<std::string> lines() const;
};

ApproxReport check_single_approx(const PartialAlgebra& a, const Procedure& P, const SingleOracle& F,
                                 const std::vector<ValueTuple>& inputs, unsigned n_lo, unsigned n_hi,
                                 const ApproxOptions& opt = {});
ApproxReport check_multi_approx(const PartialAlgebra& a, const Procedure& P, const MultiOracle& F,
                                const std::vector<ValueTuple>& inputs, unsigned n_lo, unsigned n_hi,
                                const ApproxOptions& opt = {});

// Inserts n at the precision slot.
ValueTuple with_precision(const ValueTuple& x, std::optional<std::size_t> slot, unsigned n);

// Strategies dovetail:seed for seed in [first, first + count).
std::vector<ChoiceStrategy> dovetail_seeds(std::uint64_t first, std::size_t count);

// Coefficient array for horner.
Value polynomial_value(const std::vector<Rational>& coeffs);

}  // namespace whilecc

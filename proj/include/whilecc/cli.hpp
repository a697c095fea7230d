#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "whilecc/interp.hpp"
#include "whilecc/lang.hpp"

namespace whilecc::cli {

enum class Format { Text, JsonLines };

struct RunConfig {
  std::string program;    // stdlib/fixture name or a path to a .wcc file
  std::string procedure;  // empty: the manifest entry's, else the first one
  std::string input;      // tuple literal, without the precision input
  std::optional<unsigned> n;
  std::string strategy = "dovetail";
  std::optional<std::uint64_t> fuel;
  std::optional<std::uint64_t> seed;
  Format format = Format::Text;
};

// Thrown for anything that should exit with status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fuel when none is given: WHILECC_FUEL_DEFAULT, else 10^6.
std::uint64_t default_fuel();

// Parses "(v1, ..., vk)" or "v1, ..., vk" against the given sorts. Values:
// naturals, true/false, rationals p/q or decimals, registry codes such as
// sqrt2 or e, and arrays [v1, ..., vk] for starred sorts.
ValueTuple parse_inputs(const std::string& text, const std::vector<Sort>& sorts);

// "p/q ~ d.ddd" with `digits` fraction digits; e-codes are shown through
// their n-th rational.
std::string format_value(const Value& v, unsigned digits);

// A resolved program: source text, procedure and precision slot.
struct Target {
  Program program;
  std::string procedure;
  std::string display_name;
  std::optional<std::size_t> precision_input;
  std::string oracle;  // manifest oracle name, empty if none
};
Target resolve(const RunConfig& cfg);

ChoiceStrategy strategy_of(const RunConfig& cfg);

// Returns the exit status: 0 converged, 2 maybe divergent.
int run(const RunConfig& cfg, std::ostream& out);

// Seeds and precisions from "a..b" or "a,b,c".
std::vector<std::uint64_t> parse_list(const std::string& text);

// Table of outcomes by (seed, n) and a census of distinct outputs. Cells run
// on `threads` workers; the report is ordered by (seed, n) regardless.
int sweep(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds, const std::vector<std::uint64_t>& ns,
          std::ostream& out, unsigned threads = 0);

}  // namespace whilecc::cli

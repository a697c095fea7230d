#include "whilecc/programs.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace whilecc {

namespace embedded {
// Generated at configure time from programs/.
const std::map<std::string, std::string>& files();
}  // namespace embedded

namespace {

struct Library {
  std::vector<StdlibEntry> examples;
  std::vector<StdlibEntry> extra;
};

StdlibEntry::Contract contract_of(const std::string& s) {
  if (s == "single") return StdlibEntry::Contract::Single;
  if (s == "multi") return StdlibEntry::Contract::Multi;
  if (s == "exact") return StdlibEntry::Contract::Exact;
  throw std::runtime_error("unknown contract '" + s + "' in manifest");
}

const Library& library() {
  static const Library lib = [] {
    Library l;
    const auto& files = embedded::files();
    auto manifest = nlohmann::json::parse(files.at("manifest.json"));
    for (const auto& p : manifest.at("programs")) {
      StdlibEntry e;
      e.name = p.at("name").get<std::string>();
      e.file = p.at("file").get<std::string>();
      e.source = files.at(e.file);
      e.procedure = p.at("procedure").get<std::string>();
      e.contract = contract_of(p.at("contract").get<std::string>());
      e.oracle = p.at("oracle").get<std::string>();
      if (!p.at("precision_input").is_null()) e.precision_input = p.at("precision_input").get<std::size_t>();
      e.paper_example = p.at("paper_example").get<bool>();
      e.summary = p.value("summary", "");
      e.algebra = parse_program(e.source).algebra_name;
      (e.paper_example ? l.examples : l.extra).push_back(std::move(e));
    }
    return l;
  }();
  return lib;
}

int sign(const Rational& q) { return sgn(q); }

}  // namespace

Program StdlibEntry::parse() const { return parse_program(source); }

const std::vector<StdlibEntry>& stdlib() { return library().examples; }
const std::vector<StdlibEntry>& fixtures() { return library().extra; }

const StdlibEntry& program_entry(const std::string& name) {
  for (const auto* list : {&stdlib(), &fixtures()})
    for (const auto& e : *list)
      if (e.name == name) return e;
  throw std::out_of_range("no program named '" + name + "'");
}

std::string with_window(const std::string& source, const Rational& W) {
  const std::string key = "def W(): real = ";
  auto pos = source.find(key);
  if (pos == std::string::npos) throw std::invalid_argument("source has no window definition");
  auto end = source.find('\n', pos);
  return source.substr(0, pos + key.size()) + to_string(W) + source.substr(end);
}

std::optional<Enclosure> enclose_value(const Value& v, unsigned bits) {
  if (v.is_nat()) return Enclosure{Rational(v.as_nat()), 0};
  if (v.is_bool()) return Enclosure{Rational(v.as_bool() ? 1 : 0), 0};
  const Real* r = v.is_real() ? &v.as_real() : v.is_interval() ? &v.as_interval() : nullptr;
  if (!r) return std::nullopt;
  if (r->is_exact()) return Enclosure{r->exact(), 0};
  return Enclosure{r->approx(bits), pow2(-static_cast<long>(bits))};
}

Rational deviation_bound(const Enclosure& a, const Enclosure& b) {
  return abs(Rational(a.center - b.center)) + a.radius + b.radius;
}

// ------------------------------------------------------------ oracles

namespace oracles {

Rational exp_partial_sum(const Rational& x, unsigned n) {
  const unsigned long top = 1UL << (n + 1);
  Rational sum(0), term(1);
  for (unsigned long i = 0; i <= top; ++i) {
    if (i > 0) term = term * x / Rational(static_cast<long>(i));
    sum += term;
  }
  sum.canonicalize();
  return sum;
}

Enclosure exp_value(const Rational& x, unsigned bits) {
  const Rational ax = abs(x);
  const Rational eps = pow2(-static_cast<long>(bits) - 2);
  Rational sum(1), term(1);
  for (long i = 1;; ++i) {
    term = term * x / Rational(i);
    sum += term;
    Rational next = abs(term) * ax / Rational(i + 1);
    // Once |x| / (j+1) <= 1/2 the tail is at most twice its first term.
    if (2 * ax <= Rational(i + 2) && next <= eps) break;
  }
  sum.canonicalize();
  return {sum, pow2(-static_cast<long>(bits))};
}

std::vector<unsigned> pivot_set(const std::vector<Rational>& x) {
  std::vector<unsigned> out;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0) out.push_back(static_cast<unsigned>(i + 1));
  return out;
}

Rational polynomial(const std::vector<Rational>& coeffs, const Rational& x) {
  Rational acc(0);
  for (const auto& c : coeffs) acc = acc * x + c;
  return acc;
}

Rational f_family(const Rational& c, const Rational& x) {
  return c + x - abs(Rational(x + 1)) + abs(Rational(x - 1));
}

std::vector<Enclosure> sign_change_roots(const std::function<Rational(const Rational&)>& f, const Rational& lo,
                                         const Rational& hi, unsigned grid_bits, unsigned bits) {
  const Rational step = pow2(-static_cast<long>(grid_bits));
  const Rational width = pow2(-static_cast<long>(bits));
  std::vector<Rational> xs;
  for (Rational x = lo; x <= hi; x += step) xs.push_back(x);
  std::vector<Rational> fx;
  for (const auto& x : xs) fx.push_back(f(x));
  std::vector<Enclosure> roots;
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
    if (sign(fx[j]) == 0) {
      if (j > 0 && sign(fx[j - 1]) * sign(fx[j + 1]) < 0) roots.push_back({xs[j], 0});
      continue;
    }
    if (sign(fx[j]) * sign(fx[j + 1]) >= 0) continue;
    Rational a = xs[j], b = xs[j + 1];
    const int sa = sign(fx[j]);
    bool exact = false;
    while (b - a > width) {
      Rational m = (a + b) / 2;
      const int sm = sign(f(m));
      if (sm == 0) {
        roots.push_back({m, 0});
        exact = true;
        break;
      }
      (sm == sa ? a : b) = m;
    }
    if (!exact) roots.push_back({(a + b) / 2, (b - a) / 2});
  }
  return roots;
}

bool brackets_root(const std::function<Rational(const Rational&)>& f, const Rational& v, const Rational& r,
                   unsigned grid_bits) {
  const unsigned long cells = 1ul << grid_bits;
  const Rational step = 2 * r / Rational(cells);
  int prev = sign(f(v - r));
  for (unsigned long i = 1; i <= cells; ++i) {
    const int s = sign(f(v - r + step * Rational(i)));
    if (i < cells && s == 0) return true;
    if (prev * s < 0) return true;
    prev = s;
  }
  return false;
}

Natural least_divisor(const Natural& n) {
  if (n < 2) return n;
  Natural d = 2;
  while (n % d != 0) ++d;
  return d;
}

Natural isqrt(const Natural& n) {
  Natural r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

std::pair<Natural, Natural> ackermann_toy(const Natural& n) {
  Natural z = n < 3 ? Natural(0) : Natural((n - 3) / 2 + 1);
  return {z, 2 * z + 3};
}

}  // namespace oracles

// ------------------------------------------------------------ named oracles

namespace {

Rational exact_real(const Value& v, const char* what) {
  const Real* r = v.is_real() ? &v.as_real() : v.is_interval() ? &v.as_interval() : nullptr;
  if (!r || !r->is_exact()) throw std::invalid_argument(std::string(what) + " needs an exact rational input");
  return r->exact();
}

std::vector<Rational> coefficients(const Value& p) {
  std::vector<Rational> out;
  for (const auto& c : *p.as_array().items) out.push_back(exact_real(c, "poly_roots"));
  return out;
}

const Rational kWindow(8);

std::vector<std::vector<Enclosure>> singletons(const std::vector<Enclosure>& roots) {
  std::vector<std::vector<Enclosure>> out;
  for (const auto& r : roots) out.push_back({r});
  return out;
}

}  // namespace

SingleOracle single_oracle(const std::string& name) {
  using R = std::optional<std::vector<Enclosure>>;
  if (name == "exp")
    return [](const ValueTuple& x, unsigned bits) -> R { return std::vector{oracles::exp_value(exact_real(x.at(0), "exp"), bits)}; };
  if (name == "identity")
    return [](const ValueTuple& x, unsigned bits) -> R {
      auto e = enclose_value(x.at(0), bits);
      if (!e) return std::nullopt;
      return std::vector{*e};
    };
  if (name == "least_divisor")
    return [](const ValueTuple& x, unsigned) -> R {
      return std::vector{Enclosure{Rational(oracles::least_divisor(x.at(0).as_nat())), 0}};
    };
  if (name == "isqrt")
    return [](const ValueTuple& x, unsigned) -> R {
      return std::vector{Enclosure{Rational(oracles::isqrt(x.at(0).as_nat())), 0}};
    };
  if (name == "ackermann_toy")
    return [](const ValueTuple& x, unsigned) -> R {
      auto [z, m] = oracles::ackermann_toy(x.at(0).as_nat());
      return std::vector{Enclosure{Rational(z), 0}, Enclosure{Rational(m), 0}};
    };
  throw std::out_of_range("no single-valued oracle '" + name + "'");
}

MultiOracle multi_oracle(const std::string& name) {
  if (name == "pivot_set")
    return [](const ValueTuple& x, unsigned) {
      std::vector<Rational> q;
      for (const auto& v : x) q.push_back(exact_real(v, "pivot_set"));
      std::vector<std::vector<Enclosure>> out;
      for (unsigned i : oracles::pivot_set(q)) out.push_back({Enclosure{Rational(i), 0}});
      return out;
    };
  if (name == "poly_roots")
    return [](const ValueTuple& x, unsigned bits) {
      auto c = coefficients(x.at(0));
      return singletons(oracles::sign_change_roots([c](const Rational& t) { return oracles::polynomial(c, t); },
                                                   -kWindow, kWindow, 6, bits));
    };
  if (name == "fa_roots")
    return [](const ValueTuple& x, unsigned bits) {
      Rational c = exact_real(x.at(0), "fa_roots");
      return singletons(oracles::sign_change_roots([c](const Rational& t) { return oracles::f_family(c, t); },
                                                   -kWindow, kWindow, 6, bits));
    };
  SingleOracle single = single_oracle(name);
  return [single](const ValueTuple& x, unsigned bits) {
    std::vector<std::vector<Enclosure>> out;
    if (auto v = single(x, bits)) out.push_back(*v);
    return out;
  };
}

bool known_oracle(const std::string& name) {
  try {
    multi_oracle(name);
    return true;
  } catch (const std::out_of_range&) {
    return false;
  }
}

// ------------------------------------------------------------ harness

ValueTuple with_precision(const ValueTuple& x, std::optional<std::size_t> slot, unsigned n) {
  if (!slot) return x;
  ValueTuple out = x;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(std::min(*slot, out.size())), Value::nat(Natural(n)));
  return out;
}

std::vector<ChoiceStrategy> dovetail_seeds(std::uint64_t first, std::size_t count) {
  std::vector<ChoiceStrategy> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(ChoiceStrategy::dovetail(first + i));
  return out;
}

Value polynomial_value(const std::vector<Rational>& coeffs) {
  std::vector<Value> items;
  for (const auto& c : coeffs) items.push_back(Value::real(Real(c)));
  return Value::array(Sort::real(), std::move(items));
}

namespace {

constexpr unsigned kGuardBits = 24;

// Max over components of the deviation bound; nullopt if a component has no
// enclosure.
std::optional<Rational> tuple_deviation(const ValueTuple& out, const std::vector<Enclosure>& target, unsigned bits) {
  if (out.size() != target.size()) return std::nullopt;
  Rational worst(0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    auto e = enclose_value(out[j], bits);
    if (!e) return std::nullopt;
    worst = std::max(worst, deviation_bound(*e, target[j]));
  }
  return worst;
}

std::string causes_text(const ResultSet& r) {
  std::string s;
  for (const auto& c : r.causes) s += (s.empty() ? "" : ",") + c;
  return s;
}

}  // namespace

bool ApproxReport::passed() const { return failures() == 0; }

std::size_t ApproxReport::failures() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const Cell& c) { return !c.pass; }));
}

std::vector<std::string> ApproxReport::lines() const {
  std::vector<std::string> out;
  for (const auto& c : cells)
    out.push_back(std::string(c.pass ? "PASS " : "FAIL ") + program + " x=" + to_string(c.input) +
                  " n=" + std::to_string(c.n) + " " + c.strategy + " dev=" + to_decimal(c.max_deviation, 12) + " " +
                  c.detail);
  for (const auto& c : coverage)
    out.push_back("COVER " + program + " x=" + to_string(c.input) + " n=" + std::to_string(c.n) + " " +
                  std::to_string(c.covered) + "/" + std::to_string(c.targets) + " targets, " +
                  std::to_string(c.distinct_outputs) + " distinct outputs");
  return out;
}

ApproxReport check_single_approx(const PartialAlgebra& a, const Procedure& P, const SingleOracle& F,
                                 const std::vector<ValueTuple>& inputs, unsigned n_lo, unsigned n_hi,
                                 const ApproxOptions& opt) {
  ApproxReport rep;
  rep.program = P.name;
  for (const auto& x : inputs)
    for (unsigned n = n_lo; n <= n_hi; ++n) {
      const unsigned bits = n + kGuardBits;
      auto target = F(x, bits);
      for (const auto& strat : opt.strategies) {
        ApproxReport::Cell cell;
        cell.input = x;
        cell.n = n;
        cell.strategy = strat.to_string();
        cell.outcome = run_procedure(a, P, with_precision(x, opt.precision_input, n), strat, opt.fuel);
        const ResultSet& r = cell.outcome;
        if (target) {
          cell.oracle = {*target};
          bool ok = !r.values.empty() && !r.maybe_divergent;
          for (const auto& out : r.values) {
            auto d = tuple_deviation(out, *target, bits);
            if (!d) {
              ok = false;
              continue;
            }
            cell.max_deviation = std::max(cell.max_deviation, *d);
            ok = ok && *d < pow2(-static_cast<long>(n));
          }
          cell.pass = ok;
          if (r.values.empty())
            cell.detail = "no output (" + causes_text(r) + ")";
          else if (r.maybe_divergent)
            cell.detail = "may diverge (" + causes_text(r) + ")";
          else
            cell.detail = std::to_string(r.values.size()) + " output(s)";
        } else if (opt.strict) {
          cell.pass = r.values.empty();
          cell.detail = cell.pass ? "outside dom(F), consistent with undefined" : "outside dom(F) but produced output";
        } else {
          cell.pass = true;
          cell.detail = "outside dom(F), not checked";
        }
        rep.cells.push_back(std::move(cell));
      }
    }
  return rep;
}

ApproxReport check_multi_approx(const PartialAlgebra& a, const Procedure& P, const MultiOracle& F,
                                const std::vector<ValueTuple>& inputs, unsigned n_lo, unsigned n_hi,
                                const ApproxOptions& opt) {
  ApproxReport rep;
  rep.program = P.name;
  for (const auto& x : inputs)
    for (unsigned n = n_lo; n <= n_hi; ++n) {
      const unsigned bits = n + kGuardBits;
      const Rational tol = pow2(-static_cast<long>(n));
      const auto targets = F(x, bits);
      std::vector<ValueTuple> pooled;
      for (const auto& strat : opt.strategies) {
        ApproxReport::Cell cell;
        cell.input = x;
        cell.n = n;
        cell.strategy = strat.to_string();
        cell.oracle = targets;
        cell.outcome = run_procedure(a, P, with_precision(x, opt.precision_input, n), strat, opt.fuel);
        const ResultSet& r = cell.outcome;
        if (targets.empty()) {
          cell.pass = r.values.empty();
          cell.detail = cell.pass ? "no targets, consistent with undefined (" + causes_text(r) + ")"
                                  : "no targets but produced output";
        } else {
          bool ok = !r.values.empty() && !r.maybe_divergent;
          for (const auto& out : r.values) {
            std::optional<Rational> best;
            for (const auto& t : targets)
              if (auto d = tuple_deviation(out, t, bits); d && (!best || *d < *best)) best = d;
            if (!best) {
              ok = false;
              continue;
            }
            cell.max_deviation = std::max(cell.max_deviation, *best);
            ok = ok && *best < tol;
            if (std::none_of(pooled.begin(), pooled.end(), [&](const ValueTuple& p) { return identical(p, out); }))
              pooled.push_back(out);
          }
          cell.pass = ok;
          if (r.values.empty())
            cell.detail = "no output (" + causes_text(r) + ")";
          else if (r.maybe_divergent)
            cell.detail = "may diverge (" + causes_text(r) + ")";
          else
            cell.detail = std::to_string(r.values.size()) + " output(s)";
        }
        rep.cells.push_back(std::move(cell));
      }
      ApproxReport::Coverage cov;
      cov.input = x;
      cov.n = n;
      cov.targets = targets.size();
      cov.distinct_outputs = pooled.size();
      for (const auto& t : targets)
        cov.covered += std::any_of(pooled.begin(), pooled.end(), [&](const ValueTuple& out) {
          auto d = tuple_deviation(out, t, bits);
          return d && *d < tol;
        });
      rep.coverage.push_back(cov);
    }
  return rep;
}

}  // namespace whilecc

#include "whilecc/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "whilecc/programs.hpp"
#include "whilecc/real_arith.hpp"
#include "whilecc/reals.hpp"

namespace whilecc::cli {

using json = nlohmann::json;

std::uint64_t default_fuel() {
  if (const char* env = std::getenv("WHILECC_FUEL_DEFAULT")) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(env, &used);
      if (used == std::string(env).size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("WHILECC_FUEL_DEFAULT must be a positive integer, got '") + env + "'");
  }
  return 1'000'000;
}

// ------------------------------------------------------------ input literals

namespace {

class LiteralParser {
 public:
  explicit LiteralParser(const std::string& text) : s_(text) {}

  ValueTuple tuple(const std::vector<Sort>& sorts) {
    skip();
    const bool paren = peek() == '(';
    if (paren) ++pos_;
    ValueTuple out;
    skip();
    if (!(paren && peek() == ')') && !at_end()) {
      for (;;) {
        if (out.size() == sorts.size()) fail("too many inputs, expected " + std::to_string(sorts.size()));
        out.push_back(value(sorts[out.size()]));
        skip();
        if (peek() != ',') break;
        ++pos_;
      }
    }
    if (paren) expect(')');
    skip();
    if (!at_end()) fail("unexpected '" + std::string(1, peek()) + "'");
    if (out.size() != sorts.size())
      fail("expected " + std::to_string(sorts.size()) + " input(s), got " + std::to_string(out.size()));
    return out;
  }

 private:
  Value value(const Sort& sort) {
    skip();
    if (sort.starred()) {
      expect('[');
      std::vector<Value> items;
      skip();
      if (peek() != ']') {
        for (;;) {
          items.push_back(value(sort.element()));
          skip();
          if (peek() != ',') break;
          ++pos_;
        }
      }
      expect(']');
      return Value::array(sort.element(), std::move(items));
    }
    const std::string tok = token();
    if (tok.empty()) fail("missing value of sort " + sort.name());
    try {
      if (sort.is_nat()) {
        if (!std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
          fail("'" + tok + "' is not a natural number");
        return Value::nat(Natural(tok, 10));
      }
      if (sort.is_bool()) {
        if (tok == "true") return Value::boolean(true);
        if (tok == "false") return Value::boolean(false);
        fail("'" + tok + "' is not a boolean");
      }
      if (sort == Sort::real() || sort == Sort::interval()) {
        Real r = real(tok);
        if (sort == Sort::real()) return Value::real(r);
        auto i = real_arith::make_interval(r);
        if (!i) fail("'" + tok + "' is not in [0, 1]");
        return Value::interval(*i);
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      fail("bad value '" + tok + "': " + e.what());
    }
    fail("inputs of sort " + sort.name() + " cannot be given on the command line");
  }

  static Real real(const std::string& tok) {
    const char c = tok.front();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')
      return Real(parse_rational(tok));
    return Real(CodeRegistry::instance().parse(tok));
  }

  std::string token() {
    const std::size_t start = pos_;
    while (!at_end() && peek() != ',' && peek() != ')' && peek() != ']' && peek() != '(' && peek() != '[') ++pos_;
    std::string t = s_.substr(start, pos_ - start);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    return t;
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw UsageError("input: " + why + " (at column " + std::to_string(pos_ + 1) + ")");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

ValueTuple parse_inputs(const std::string& text, const std::vector<Sort>& sorts) {
  return LiteralParser(text).tuple(sorts);
}

std::string format_value(const Value& v, unsigned digits) {
  auto show = [digits](const Real& r) {
    if (r.is_exact()) return to_string(r.exact()) + " ~ " + to_decimal(r.exact(), static_cast<int>(digits));
    Rational q = r.approx(static_cast<unsigned>(digits * 10 / 3 + 4));
    return r.describe() + " ~ " + to_decimal(q, static_cast<int>(digits));
  };
  if (v.is_real()) return show(v.as_real());
  if (v.is_interval()) return "interval " + show(v.as_interval());
  if (v.is_array()) {
    std::string out = "[";
    const auto& items = *v.as_array().items;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + format_value(items[i], digits);
    return out + "]";
  }
  return v.to_string();
}

// ------------------------------------------------------------ resolution

Target resolve(const RunConfig& cfg) {
  Target t;
  std::optional<StdlibEntry> entry;
  try {
    entry = program_entry(cfg.program);
  } catch (const std::out_of_range&) {
  }
  try {
    if (entry) {
      t.program = entry->parse();
      t.procedure = cfg.procedure.empty() ? entry->procedure : cfg.procedure;
      t.display_name = entry->name;
      t.oracle = entry->oracle;
    } else {
      std::ifstream in(cfg.program);
      if (!in) throw UsageError("cannot read program '" + cfg.program + "' (not a stdlib name or readable file)");
      std::stringstream ss;
      ss << in.rdbuf();
      t.program = parse_program(ss.str());
      if (t.program.procedures.empty()) throw UsageError(cfg.program + ": no procedures");
      t.procedure = cfg.procedure.empty() ? t.program.procedures.front().name : cfg.procedure;
      t.display_name = cfg.program;
    }
  } catch (const ParseError& e) {
    throw UsageError(cfg.program + ": " + e.diagnostic().to_string());
  }
  const Procedure* p = nullptr;
  for (const auto& q : t.program.procedures)
    if (q.name == t.procedure) p = &q;
  if (!p) throw UsageError("no procedure '" + t.procedure + "' in " + t.display_name);
  if (entry && t.procedure == entry->procedure) {
    t.precision_input = entry->precision_input;
  } else if (cfg.n) {
    // Outside the manifest, --n fills a nat input named n.
    for (std::size_t i = 0; i < p->in.size(); ++i)
      if (p->in[i].name == "n" && p->in[i].sort.is_nat()) t.precision_input = i;
  }
  return t;
}

ChoiceStrategy strategy_of(const RunConfig& cfg) {
  ChoiceStrategy s;
  try {
    s = ChoiceStrategy::parse(cfg.strategy);
  } catch (const std::exception& e) {
    throw UsageError("strategy: " + std::string(e.what()));
  }
  if (cfg.seed) {
    if (s.kind == ChoiceStrategy::Kind::Enumerate) throw UsageError("--seed does not apply to enumerate");
    s = s.kind == ChoiceStrategy::Kind::Oracle ? ChoiceStrategy::oracle(*cfg.seed) : ChoiceStrategy::dovetail(*cfg.seed);
  }
  return s;
}

namespace {

struct Prepared {
  Target target;
  const Procedure* proc = nullptr;
  ValueTuple base;  // inputs without the precision input
  std::uint64_t fuel = 0;
};

Prepared prepare(const RunConfig& cfg) {
  Prepared p;
  p.target = resolve(cfg);
  p.proc = &p.target.program.procedure(p.target.procedure);
  std::vector<Sort> sorts = p.proc->input_sorts();
  if (p.target.precision_input) sorts.erase(sorts.begin() + static_cast<std::ptrdiff_t>(*p.target.precision_input));
  p.base = parse_inputs(cfg.input, sorts);
  p.fuel = cfg.fuel ? *cfg.fuel : default_fuel();
  if (p.fuel == 0) throw UsageError("fuel must be positive");
  return p;
}

ValueTuple full_input(const Prepared& p, std::optional<unsigned> n) {
  if (!p.target.precision_input) return p.base;
  if (!n) throw UsageError(p.target.display_name + " needs a precision --n");
  return with_precision(p.base, p.target.precision_input, *n);
}

struct RunResult {
  ResultSet outcome;
  RunStats stats;
  std::uint64_t fuel_used = 0;
};

RunResult execute(const Prepared& p, const ValueTuple& x, const ChoiceStrategy& s) {
  Machine m(*p.target.program.algebra, s);
  Fuel fuel(p.fuel);
  RunResult r;
  r.outcome = m.eval_proc(*p.proc, x, fuel);
  r.stats = m.stats();
  r.fuel_used = fuel.used();
  return r;
}

json value_json(const Value& v, unsigned digits) {
  json j;
  j["text"] = format_value(v, digits);
  const Real* r = v.is_real() ? &v.as_real() : v.is_interval() ? &v.as_interval() : nullptr;
  if (r && r->is_exact()) j["exact"] = to_string(r->exact());
  if (v.is_nat()) j["exact"] = v.as_nat().get_str();
  return j;
}

std::vector<std::string> causes(const ResultSet& r) { return {r.causes.begin(), r.causes.end()}; }

}  // namespace

int run(const RunConfig& cfg, std::ostream& out) {
  Prepared p = prepare(cfg);
  const ChoiceStrategy s = strategy_of(cfg);
  const ValueTuple x = full_input(p, cfg.n);
  const unsigned digits = (cfg.n ? *cfg.n : 4) + 2;
  RunResult r = execute(p, x, s);
  const ResultSet& o = r.outcome;
  const int status = o.maybe_divergent ? 2 : 0;

  if (cfg.format == Format::JsonLines) {
    json j;
    j["program"] = p.target.display_name;
    j["procedure"] = p.proc->name;
    j["input"] = to_string(x);
    if (cfg.n) j["n"] = *cfg.n;
    j["strategy"] = s.to_string();
    j["fuel"] = p.fuel;
    j["outputs"] = json::array();
    for (const auto& t : o.values) {
      json row = json::array();
      for (const auto& v : t) row.push_back(value_json(v, digits));
      j["outputs"].push_back(row);
    }
    j["maybe_divergent"] = o.maybe_divergent;
    j["truncated"] = o.truncated;
    j["causes"] = causes(o);
    j["stats"] = {{"nodes", r.stats.nodes},
                  {"choose_evals", r.stats.choose_evals},
                  {"dovetail_probes", r.stats.dovetail_probes},
                  {"fuel_used", r.fuel_used}};
    j["exit"] = status;
    out << j.dump() << "\n";
    return status;
  }

  out << "program   " << p.target.display_name << " / " << p.proc->name << "\n";
  out << "input     " << to_string(x) << "\n";
  out << "strategy  " << s.to_string() << ", fuel " << p.fuel << "\n";
  out << "outcomes  " << o.values.size() << (o.values.size() == 1 ? " value" : " values") << "\n";
  for (const auto& t : o.values) {
    out << " ";
    for (std::size_t i = 0; i < t.size(); ++i) out << " " << p.proc->out[i].name << " = " << format_value(t[i], digits);
    out << "\n";
  }
  std::string why;
  for (const auto& c : o.causes) why += (why.empty() ? "" : ", ") + c;
  out << "divergent " << (o.maybe_divergent ? "maybe" : "no");
  if (o.truncated) out << " (outcome set truncated)";
  if (!why.empty()) out << " [" << why << "]";
  out << "\n";
  out << "stats     nodes " << r.stats.nodes << ", choose evals " << r.stats.choose_evals << ", dovetail probes "
      << r.stats.dovetail_probes << ", fuel used " << r.fuel_used << "\n";
  return status;
}

// ------------------------------------------------------------ sweep

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  auto num = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw UsageError("bad list element '" + s + "' in '" + text + "'");
    return std::stoull(s);
  };
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part.erase(std::remove_if(part.begin(), part.end(), [](unsigned char c) { return std::isspace(c); }), part.end());
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(num(part));
      continue;
    }
    const std::uint64_t a = num(part.substr(0, dots)), b = num(part.substr(dots + 2));
    if (b < a) throw UsageError("empty range '" + part + "'");
    for (std::uint64_t i = a; i <= b; ++i) out.push_back(i);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

int sweep(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds, const std::vector<std::uint64_t>& ns,
          std::ostream& out, unsigned threads) {
  Prepared p = prepare(cfg);
  ChoiceStrategy base = strategy_of(cfg);
  if (base.kind == ChoiceStrategy::Kind::Enumerate) throw UsageError("sweep needs a seeded strategy");
  MultiOracle oracle;
  if (!p.target.oracle.empty() && known_oracle(p.target.oracle)) oracle = multi_oracle(p.target.oracle);

  struct Cell {
    std::uint64_t seed = 0;
    unsigned n = 0;
    ValueTuple input;
    RunResult result;
    std::vector<std::vector<Enclosure>> targets;
    std::optional<Rational> deviation;       // worst distance to the nearest target
    std::vector<std::optional<std::size_t>> nearest;  // per output
    std::string error;
  };
  std::vector<Cell> cells;
  for (auto seed : seeds)
    for (auto n : ns) {
      Cell c;
      c.seed = seed;
      c.n = static_cast<unsigned>(n);
      c.input = full_input(p, c.n);
      cells.push_back(std::move(c));
    }

  auto work = [&](Cell& c) {
    ChoiceStrategy s = base.kind == ChoiceStrategy::Kind::Oracle ? ChoiceStrategy::oracle(c.seed)
                                                                  : ChoiceStrategy::dovetail(c.seed);
    try {
      c.result = execute(p, c.input, s);
      if (!oracle) return;
      const unsigned bits = c.n + 24;
      c.targets = oracle(p.base, bits);
      for (const auto& t : c.result.outcome.values) {
        std::optional<std::size_t> best;
        std::optional<Rational> best_d;
        for (std::size_t i = 0; i < c.targets.size(); ++i) {
          if (c.targets[i].size() != t.size()) continue;
          Rational worst(0);
          bool ok = true;
          for (std::size_t j = 0; j < t.size() && ok; ++j) {
            auto e = enclose_value(t[j], bits);
            if (!e) ok = false;
            else worst = std::max(worst, deviation_bound(*e, c.targets[i][j]));
          }
          if (ok && (!best_d || worst < *best_d)) best_d = worst, best = i;
        }
        c.nearest.push_back(best);
        if (best_d && (!c.deviation || *best_d > *c.deviation)) c.deviation = best_d;
      }
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < cells.size();) work(cells[k]);
    });
  for (std::size_t k; (k = next++) < cells.size();) work(cells[k]);
  for (auto& t : pool) t.join();

  // Census: outputs grouped by nearest target when an oracle is known, else
  // by identical value.
  std::map<std::string, std::size_t> census;
  std::size_t divergent = 0;
  const unsigned digits = 6;
  for (const auto& c : cells) {
    divergent += c.result.outcome.maybe_divergent;
    for (std::size_t i = 0; i < c.result.outcome.values.size(); ++i) {
      std::string key;
      if (oracle && i < c.nearest.size() && c.nearest[i]) {
        const auto& t = c.targets[*c.nearest[i]];
        for (std::size_t j = 0; j < t.size(); ++j) key += (j ? ", " : "") + to_decimal(t[j].center, digits);
        key = "near " + key;
      } else {
        key = to_string(c.result.outcome.values[i]);
      }
      ++census[key];
    }
  }

  const std::string strategy_name = base.kind == ChoiceStrategy::Kind::Oracle ? "oracle" : "dovetail";
  if (cfg.format == Format::JsonLines) {
    for (const auto& c : cells) {
      json j;
      j["seed"] = c.seed;
      j["n"] = c.n;
      j["strategy"] = strategy_name + ":" + std::to_string(c.seed);
      j["outputs"] = json::array();
      for (const auto& t : c.result.outcome.values) j["outputs"].push_back(to_string(t));
      j["maybe_divergent"] = c.result.outcome.maybe_divergent;
      j["causes"] = causes(c.result.outcome);
      if (c.deviation) j["deviation"] = to_decimal(*c.deviation, 12);
      if (!c.error.empty()) j["error"] = c.error;
      j["fuel_used"] = c.result.fuel_used;
      out << j.dump() << "\n";
    }
    json cj;
    cj["census"] = census;
    cj["clusters"] = census.size();
    cj["cells"] = cells.size();
    cj["divergent_cells"] = divergent;
    out << cj.dump() << "\n";
    return 0;
  }

  out << "sweep " << p.target.display_name << " / " << p.proc->name << " input " << to_string(p.base) << ", "
      << strategy_name << ", fuel " << p.fuel << "\n";
  out << "seed\tn\tstatus\tdeviation\toutputs\n";
  for (const auto& c : cells) {
    const auto& o = c.result.outcome;
    std::string status = !c.error.empty() ? "error" : o.maybe_divergent ? "maybe-div" : "ok";
    out << c.seed << "\t" << c.n << "\t" << status << "\t"
        << (c.deviation ? to_decimal(*c.deviation, 12) : std::string("-")) << "\t";
    if (!c.error.empty()) out << c.error;
    for (std::size_t i = 0; i < o.values.size(); ++i) {
      out << (i ? "; " : "");
      const auto& t = o.values[i];
      for (std::size_t j = 0; j < t.size(); ++j) out << (j ? ", " : "") << format_value(t[j], c.n + 2);
    }
    out << "\n";
  }
  out << "census: " << census.size() << (census.size() == 1 ? " cluster" : " clusters") << " over " << cells.size()
      << " cells (" << divergent << " maybe divergent)\n";
  for (const auto& [k, count] : census) out << "  " << count << "\t" << k << "\n";
  return 0;
}

}  // namespace whilecc::cli

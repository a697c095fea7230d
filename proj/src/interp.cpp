#include <sstream>

#include "whilecc/interp.hpp"

namespace whilecc {

namespace {

bool same(const Value& a, const Value& b) { return a.identical(b); }
bool same(const State& a, const State& b) { return identical(a, b); }
bool same(const StmtPtr& a, const StmtPtr& b) { return a == b || equal(*a, *b); }

template <class T>
void add_value(Outcomes<T>& o, T v) {
  for (const auto& x : o.values)
    if (same(x, v)) return;
  o.values.push_back(std::move(v));
}

template <class T, class U>
void merge(Outcomes<T>& into, Outcomes<U> from) {
  into.merge_flags(from);
  for (auto& v : from.values) add_value(into, std::move(v));
}

void diverge_from(OutcomeSet& o, const Verdict<Value>& v) { o.diverge(v.fuel_exhausted() ? "fuel" : "partial"); }

bool has_bool(const OutcomeSet& o, bool b) {
  for (const auto& v : o.values)
    if (v.as_bool() == b) return true;
  return false;
}

constexpr std::size_t kMaxCombinations = 100000;

}  // namespace

// ------------------------------------------------------------ strategies

ChoiceStrategy ChoiceStrategy::dovetail(std::optional<std::uint64_t> seed) {
  ChoiceStrategy s;
  s.kind = Kind::Dovetail;
  s.seed = seed;
  return s;
}

ChoiceStrategy ChoiceStrategy::oracle(std::uint64_t seed) {
  ChoiceStrategy s;
  s.kind = Kind::Oracle;
  s.seed = seed;
  return s;
}

ChoiceStrategy ChoiceStrategy::oracle(std::function<Natural(std::uint64_t)> rule) {
  ChoiceStrategy s;
  s.kind = Kind::Oracle;
  s.oracle_rule = std::move(rule);
  return s;
}

ChoiceStrategy ChoiceStrategy::enumerate(unsigned max_nat, std::size_t max_nodes) {
  if (max_nat == 0 || max_nodes == 0) throw std::invalid_argument("enumerate bounds must be positive");
  ChoiceStrategy s;
  s.kind = Kind::Enumerate;
  s.max_nat = max_nat;
  s.max_nodes = max_nodes;
  return s;
}

ChoiceStrategy ChoiceStrategy::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto num = [&](std::size_t i) -> std::uint64_t {
    try {
      std::size_t used = 0;
      std::uint64_t v = std::stoull(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in strategy '" + spec + "'");
    }
  };
  if (parts.empty()) throw std::invalid_argument("empty strategy");
  if (parts[0] == "dovetail" && parts.size() <= 2)
    return dovetail(parts.size() == 2 ? std::optional<std::uint64_t>(num(1)) : std::nullopt);
  if (parts[0] == "oracle" && parts.size() == 2) return oracle(num(1));
  if (parts[0] == "enumerate" && parts.size() <= 3) {
    unsigned mn = parts.size() >= 2 ? static_cast<unsigned>(num(1)) : 32;
    std::size_t nodes = parts.size() == 3 ? num(2) : 10000;
    return enumerate(mn, nodes);
  }
  throw std::invalid_argument("unknown strategy '" + spec + "'");
}

std::string ChoiceStrategy::to_string() const {
  switch (kind) {
    case Kind::Dovetail:
      return seed ? "dovetail:" + std::to_string(*seed) : "dovetail";
    case Kind::Oracle:
      return oracle_rule && !seed ? "oracle:rule" : "oracle:" + std::to_string(seed.value_or(0));
    case Kind::Enumerate:
      return "enumerate:" + std::to_string(max_nat) + ":" + std::to_string(max_nodes);
  }
  return {};
}

Natural ChoiceStrategy::oracle_candidate(std::uint64_t counter) const {
  if (oracle_rule) return oracle_rule(counter);
  std::uint64_t r = splitmix64(seed.value_or(0) + counter);
  return Natural(static_cast<unsigned long>(r % oracle_range));
}

DovetailOrder::DovetailOrder(std::optional<std::uint64_t> seed, unsigned jumps, unsigned jump_bits) {
  if (!seed) return;
  const std::uint64_t mask = jump_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << jump_bits) - 1;
  std::set<std::uint64_t> seen;
  std::uint64_t state = *seed;
  while (jumps_.size() < jumps && seen.size() <= mask) {
    state = splitmix64(state);
    std::uint64_t c = state & mask;
    if (seen.insert(c).second) jumps_.push_back(c);
  }
  sorted_.assign(seen.begin(), seen.end());
}

std::uint64_t DovetailOrder::operator()(std::uint64_t k) const {
  if (jumps_.empty()) return k;
  const std::uint64_t n = jumps_.size();
  if (k % 2 == 1 && k / 2 < n) return jumps_[k / 2];
  // Rank of k within the positions left for the increasing scan.
  std::uint64_t t = k - std::min<std::uint64_t>(n, k / 2);
  for (std::uint64_t s : sorted_) {
    if (s > t) break;
    ++t;
  }
  return t;
}

Verdict<Natural> dovetail_search(const std::function<Verdict<bool>(const Natural&, Fuel&)>& probe, Fuel& fuel,
                                 const DovetailOrder& order, DovetailStats* stats, std::uint64_t max_stage) {
  struct Live {
    std::uint64_t idx;
    std::uint64_t budget;  // fuel of the last probe, 0 if not yet probed
  };
  std::vector<Live> alive;
  for (std::uint64_t k = 1; max_stage == 0 || k <= max_stage; ++k) {
    if (stats) stats->stages = k;
    alive.push_back({order(k - 1), 0});
    std::vector<Live> next;
    next.reserve(alive.size());
    for (Live c : alive) {
      // An undecided candidate is probed again once its budget has doubled.
      if (c.budget != 0 && k < 2 * c.budget) {
        next.push_back(c);
        continue;
      }
      if (!fuel.consume(1)) return FuelExhausted{};
      Fuel f = fuel.slice(k);
      const bool cut = f.remaining() < k;
      Natural cand(static_cast<unsigned long>(c.idx));
      Verdict<bool> v = probe(cand, f);
      fuel.settle(f);
      if (stats) ++stats->probes;
      if (cut) return FuelExhausted{};
      if (v.converged() && v.value()) return cand;
      if (v.fuel_exhausted()) next.push_back({c.idx, k});
    }
    alive.swap(next);
  }
  return FuelExhausted{};
}

// ------------------------------------------------------------ trees

std::size_t CompTree::frontier() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.kind == Node::Kind::Config && !node.expanded;
  return n;
}

std::vector<State> CompTree::leaves() const {
  std::vector<State> out;
  for (const auto& node : nodes)
    if (node.kind == Node::Kind::StateLeaf) out.push_back(node.state);
  return out;
}

bool CompTree::has_div_leaf() const {
  for (const auto& node : nodes)
    if (node.kind == Node::Kind::DivLeaf) return true;
  return false;
}

bool CompTree::is_prefix_of(const CompTree& other) const {
  if (nodes.empty()) return true;
  if (other.nodes.empty()) return false;
  std::vector<std::pair<std::size_t, std::size_t>> todo{{0, 0}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    const Node& x = nodes[a];
    const Node& y = other.nodes[b];
    if (x.kind != y.kind || !identical(x.state, y.state)) return false;
    if (x.kind == Node::Kind::Config && !equal(*x.stmt, *y.stmt)) return false;
    if (!x.expanded) continue;
    if (!y.expanded || x.children.size() != y.children.size()) return false;
    for (std::size_t i = 0; i < x.children.size(); ++i) todo.push_back({x.children[i], y.children[i]});
  }
  return true;
}

// ------------------------------------------------------------ machine

StmtPtr first(const StmtPtr& s) {
  StmtPtr cur = s;
  while (cur->kind == Stmt::Kind::Seq) cur = cur->first;
  return cur->atomic() ? cur : Stmt::skip(cur->loc);
}

Machine::Machine(const PartialAlgebra& algebra, ChoiceStrategy strategy)
    : algebra_(algebra), strategy_(std::move(strategy)), order_(strategy_.seed, strategy_.jumps, strategy_.jump_bits) {}

OutcomeSet Machine::eval_term(const Term& t, const State& s, Fuel& fuel) {
  State st = s;
  return term(t, st, fuel);
}

OutcomeSet Machine::term(const Term& t, State& s, Fuel& fuel) {
  OutcomeSet out;
  switch (t.kind) {
    case Term::Kind::Var:
      out.values.push_back(s.at(t.slot));
      return out;
    case Term::Kind::Lit:
      out.values.push_back(algebra_.literal(t.sort, t.literal));
      return out;
    case Term::Kind::Choose:
      return choose(t, s, fuel);
    case Term::Kind::App:
      break;
  }
  if (t.symbol.conditional) {
    OutcomeSet c = term(*t.args[0], s, fuel);
    out.merge_flags(c);
    if (has_bool(c, true)) merge(out, term(*t.args[1], s, fuel));
    if (has_bool(c, false)) merge(out, term(*t.args[2], s, fuel));
    return out;
  }
  // Arguments stay in `actual` while every one is a single value; the
  // general product over outcome sets is only built when needed.
  const std::size_t arity = t.args.size();
  std::vector<Value> actual;
  actual.reserve(arity);
  std::vector<OutcomeSet> args;
  for (const auto& a : t.args) {
    OutcomeSet r = term(*a, s, fuel);
    out.merge_flags(r);
    if (r.values.empty()) return out;
    if (args.empty() && r.values.size() == 1) {
      actual.push_back(std::move(r.values.front()));
      continue;
    }
    if (args.empty())
      for (auto& v : actual) {
        args.emplace_back();
        args.back().values.push_back(std::move(v));
      }
    args.push_back(std::move(r));
  }
  if (args.empty()) {
    Verdict<Value> v = algebra_.apply(t.symbol, actual, fuel);
    if (v.converged())
      out.values.push_back(std::move(v.value()));
    else
      diverge_from(out, v);
    return out;
  }
  std::size_t combos = 1;
  for (const auto& a : args) combos *= a.values.size();
  if (combos > kMaxCombinations) {
    out.truncate("combinations");
    combos = kMaxCombinations;
  }
  std::vector<std::size_t> idx(arity, 0);
  actual.assign(arity, Value());
  for (std::size_t c = 0; c < combos; ++c) {
    for (std::size_t i = 0; i < arity; ++i) actual[i] = args[i].values[idx[i]];
    Verdict<Value> v = algebra_.apply(t.symbol, actual, fuel);
    if (v.converged())
      add_value(out, std::move(v.value()));
    else
      diverge_from(out, v);
    for (std::size_t i = arity; i-- > 0;) {
      if (++idx[i] < args[i].values.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

OutcomeSet Machine::choose(const Term& t, State& s, Fuel& fuel) {
  ++stats_.choose_evals;
  OutcomeSet out;
  const int slot = t.slot;
  Value saved = s.at(slot);
  switch (strategy_.kind) {
    case ChoiceStrategy::Kind::Enumerate: {
      bool all_fail = true;
      for (unsigned n = 0; n <= strategy_.max_nat; ++n) {
        s[slot] = Value::nat(Natural(n));
        OutcomeSet b = term(t.body(), s, fuel);
        if (b.truncated) out.truncate("choose-range");
        if (has_bool(b, true)) add_value(out, Value::nat(Natural(n)));
        if (!has_bool(b, false) && !b.maybe_divergent) all_fail = false;
      }
      out.truncate("choose-range");
      if (all_fail) out.diverge("choose-none");
      break;
    }
    case ChoiceStrategy::Kind::Oracle: {
      Natural n = strategy_.oracle_candidate(oracle_counter_++);
      s[slot] = Value::nat(n);
      OutcomeSet b = term(t.body(), s, fuel);
      out.merge_flags(b);
      if (has_bool(b, true))
        out.values.push_back(Value::nat(n));
      else if (has_bool(b, false))
        out.diverge("oracle-miss");
      break;
    }
    case ChoiceStrategy::Kind::Dovetail: {
      DovetailStats ds;
      auto probe = [&](const Natural& n, Fuel& f) -> Verdict<bool> {
        s[slot] = Value::nat(n);
        OutcomeSet b = term(t.body(), s, f);
        if (has_bool(b, true)) return true;
        if (has_bool(b, false)) return false;
        if (b.causes.count("fuel")) return FuelExhausted{};
        return ProvenDivergent{};
      };
      Verdict<Natural> r = dovetail_search(probe, fuel, order_, &ds);
      stats_.dovetail_probes += ds.probes;
      if (r.converged())
        out.values.push_back(Value::nat(r.value()));
      else
        out.diverge("fuel");
      break;
    }
  }
  s[slot] = saved;
  return out;
}

StateSet Machine::eval_atomic(const Stmt& stmt, const State& st, Fuel& fuel) {
  StateSet out;
  switch (stmt.kind) {
    case Stmt::Kind::Skip:
      out.values.push_back(st);
      return out;
    case Stmt::Kind::Div:
      out.diverge("div");
      return out;
    case Stmt::Kind::Assign:
      break;
    default:
      throw std::logic_error("eval_atomic on a compound statement");
  }
  State scratch = st;
  std::vector<OutcomeSet> rhs;
  std::size_t combos = 1;
  for (const auto& t : stmt.rhs) {
    rhs.push_back(term(*t, scratch, fuel));
    out.merge_flags(rhs.back());
    combos *= rhs.back().values.size();
    if (combos == 0) return out;
  }
  if (combos > kMaxCombinations) {
    out.truncate("combinations");
    combos = kMaxCombinations;
  }
  std::vector<std::size_t> idx(rhs.size(), 0);
  for (std::size_t c = 0; c < combos; ++c) {
    State next = st;
    for (std::size_t i = 0; i < rhs.size(); ++i) next[stmt.lhs_slots[i]] = rhs[i].values[idx[i]];
    add_value(out, std::move(next));
    for (std::size_t i = rhs.size(); i-- > 0;) {
      if (++idx[i] < rhs[i].values.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

StmtSet Machine::rest(const StmtPtr& s, const State& st, Fuel& fuel) {
  StmtSet out;
  if (s->atomic()) {
    out.values.push_back(Stmt::skip(s->loc));
    return out;
  }
  if (s->kind == Stmt::Kind::Seq) {
    if (s->first->atomic()) {
      out.values.push_back(s->second);
      return out;
    }
    StmtSet r = rest(s->first, st, fuel);
    out.merge_flags(r);
    for (const auto& x : r.values) {
      if (x->kind == Stmt::Kind::Div)
        add_value(out, x);
      else
        out.values.push_back(Stmt::seq(x, s->second));
    }
    return out;
  }
  State scratch = st;
  OutcomeSet g = term(*s->guard, scratch, fuel);
  out.causes = g.causes;
  out.truncated = g.truncated;
  if (s->kind == Stmt::Kind::If) {
    if (has_bool(g, true)) out.values.push_back(s->first);
    if (has_bool(g, false)) out.values.push_back(s->second);
  } else {
    if (has_bool(g, true)) out.values.push_back(Stmt::seq(s->first, s));
    if (has_bool(g, false)) out.values.push_back(Stmt::skip(s->loc));
  }
  if (g.maybe_divergent) out.values.push_back(Stmt::div(s->guard->loc));
  return out;
}

StateSet Machine::comp_step(const StmtPtr& s, const State& st, Fuel& fuel) { return eval_atomic(*first(s), st, fuel); }

CompTree Machine::comp_tree_stage(const StmtPtr& s, const State& st, unsigned n, Fuel& fuel) {
  CompTree tree;
  tree.nodes.push_back({CompTree::Node::Kind::Config, st, s, {}, false});
  std::vector<std::pair<std::size_t, unsigned>> queue{{0, 0}};
  const std::size_t cap = strategy_.kind == ChoiceStrategy::Kind::Enumerate ? strategy_.max_nodes : SIZE_MAX;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    auto [id, depth] = queue[qi];
    if (depth >= n) continue;
    if (tree.nodes.size() >= cap || !fuel.consume(1)) {
      tree.truncated = true;
      break;
    }
    ++stats_.nodes;
    const StmtPtr stmt = tree.nodes[id].stmt;
    const State state = tree.nodes[id].state;
    std::vector<CompTree::Node> kids;
    if (stmt->atomic()) {
      StateSet r = eval_atomic(*stmt, state, fuel);
      for (auto& v : r.values) kids.push_back({CompTree::Node::Kind::StateLeaf, std::move(v), nullptr, {}, false});
      if (r.maybe_divergent) kids.push_back({CompTree::Node::Kind::DivLeaf, {}, nullptr, {}, false});
      tree.truncated |= r.truncated;
    } else {
      StateSet step = comp_step(stmt, state, fuel);
      StmtSet rs = rest(stmt, state, fuel);
      tree.truncated |= step.truncated || rs.truncated;
      for (const auto& s2 : step.values)
        for (const auto& r : rs.values) kids.push_back({CompTree::Node::Kind::Config, s2, r, {}, false});
      if (step.maybe_divergent) kids.push_back({CompTree::Node::Kind::DivLeaf, {}, nullptr, {}, false});
    }
    tree.nodes[id].expanded = true;
    for (auto& k : kids) {
      const bool config = k.kind == CompTree::Node::Kind::Config;
      tree.nodes[id].children.push_back(tree.nodes.size());
      tree.nodes.push_back(std::move(k));
      if (config) queue.push_back({tree.nodes.size() - 1, depth + 1});
    }
  }
  return tree;
}

StateSet Machine::eval_stmt(const StmtPtr& s, const State& st, Fuel& fuel) {
  StateSet out;
  std::vector<std::pair<StmtPtr, State>> stack{{s, st}};
  const bool capped = strategy_.kind == ChoiceStrategy::Kind::Enumerate;
  std::uint64_t nodes = 0;
  while (!stack.empty()) {
    if (capped && nodes >= strategy_.max_nodes) {
      out.truncate("node-cap");
      out.diverge("frontier");
      break;
    }
    if (!fuel.consume(1)) {
      out.diverge("fuel");
      out.causes.insert("frontier");
      break;
    }
    auto [stmt, state] = std::move(stack.back());
    stack.pop_back();
    ++nodes;
    ++stats_.nodes;
    if (stmt->atomic()) {
      StateSet r = eval_atomic(*stmt, state, fuel);
      merge(out, std::move(r));
      continue;
    }
    StateSet step = comp_step(stmt, state, fuel);
    StmtSet rs = rest(stmt, state, fuel);
    out.merge_flags(step);
    if (rs.truncated) out.truncate("choose-range");
    for (const auto& r : rs.values)
      if (r->kind == Stmt::Kind::Div) out.causes.insert(rs.causes.begin(), rs.causes.end());
    // Pushed in reverse so the first outcome is explored first.
    for (std::size_t i = step.values.size(); i-- > 0;)
      for (std::size_t j = rs.values.size(); j-- > 0;) stack.push_back({rs.values[j], step.values[i]});
  }
  return out;
}

State Machine::initial_state(const Procedure& p, const ValueTuple& x) const {
  if (x.size() != p.in.size())
    throw std::invalid_argument("procedure '" + p.name + "' takes " + std::to_string(p.in.size()) + " inputs, got " +
                                std::to_string(x.size()));
  State st;
  for (const auto& v : x) st.push_back(v);
  for (const auto* group : {&p.out, &p.aux})
    for (const auto& d : *group) st.push_back(algebra_.default_value(d.sort));
  return st;
}

ResultSet Machine::eval_proc(const Procedure& p, const ValueTuple& x, Fuel& fuel) {
  return eval_proc_from(p, x, initial_state(p, x), fuel);
}

ResultSet Machine::eval_proc_from(const Procedure& p, const ValueTuple& x, State initial, Fuel& fuel) {
  State st = std::move(initial);
  if (st.size() != p.frame().size()) throw std::invalid_argument("initial state does not match the frame");
  if (x.size() != p.in.size()) throw std::invalid_argument("wrong number of inputs for '" + p.name + "'");
  for (std::size_t i = 0; i < x.size(); ++i) st[i] = x[i];
  StateSet r = eval_stmt(p.body, st, fuel);
  ResultSet out;
  out.merge_flags(r);
  const std::size_t base = p.in.size();
  for (const auto& s : r.values) {
    ValueTuple y;
    for (std::size_t i = 0; i < p.out.size(); ++i) y.push_back(s[base + i]);
    add_value(out, std::move(y));
  }
  return out;
}

ResultSet run_procedure(const PartialAlgebra& a, const Procedure& p, const ValueTuple& x,
                        const ChoiceStrategy& strategy, std::uint64_t fuel) {
  Machine m(a, strategy);
  Fuel f(fuel);
  return m.eval_proc(p, x, f);
}

DeterminismReport is_deterministic_on(const PartialAlgebra& a, const Procedure& p,
                                      const std::vector<ValueTuple>& samples, const ChoiceStrategy& strategy,
                                      std::uint64_t fuel) {
  DeterminismReport rep;
  for (const auto& x : samples) {
    DeterminismReport::Sample s;
    s.input = x;
    s.outcome = run_procedure(a, p, x, strategy, fuel);
    s.singleton = s.outcome.singleton();
    rep.all_singleton &= s.singleton;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

}  // namespace whilecc

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "whilecc/algebra.hpp"
#include "whilecc/ast.hpp"

namespace whilecc {

// Values of the procedure's variables, indexed by frame slot. Same type as
// ValueTuple, so identical() applies.
using State = std::vector<Value>;

struct ChoiceStrategy {
  enum class Kind { Dovetail, Oracle, Enumerate };

  Kind kind = Kind::Dovetail;
  // Dovetail: keys the scan order (see DovetailOrder). Oracle: keys the
  // default candidate rule.
  std::optional<std::uint64_t> seed;
  unsigned jumps = 1024;
  unsigned jump_bits = 32;
  // Oracle candidate for choose evaluation number c; defaults to
  // splitmix64(seed + c) mod oracle_range.
  std::function<Natural(std::uint64_t)> oracle_rule;
  unsigned oracle_range = 33;
  unsigned max_nat = 32;
  std::size_t max_nodes = 10000;

  static ChoiceStrategy dovetail(std::optional<std::uint64_t> seed = std::nullopt);
  static ChoiceStrategy oracle(std::uint64_t seed);
  static ChoiceStrategy oracle(std::function<Natural(std::uint64_t)> rule);
  static ChoiceStrategy enumerate(unsigned max_nat = 32, std::size_t max_nodes = 10000);
  // "dovetail", "dovetail:SEED", "oracle:SEED", "enumerate:MAXNAT:NODES".
  static ChoiceStrategy parse(const std::string& spec);

  std::string to_string() const;
  Natural oracle_candidate(std::uint64_t counter) const;
};

// Candidate order of a dovetail search. Unseeded it is the identity. Seeded,
// the odd positions 1, 3, ..., 2*jumps-1 visit `jumps` distinct keyed
// candidates below 2^jump_bits and every other position continues the
// increasing scan of the remaining naturals, so the order is a bijection
// that still reaches small witnesses early.
class DovetailOrder {
 public:
  DovetailOrder() = default;
  DovetailOrder(std::optional<std::uint64_t> seed, unsigned jumps, unsigned jump_bits);
  std::uint64_t operator()(std::uint64_t k) const;

 private:
  std::vector<std::uint64_t> jumps_;  // in visiting order
  std::vector<std::uint64_t> sorted_;
};

struct DovetailStats {
  std::uint64_t stages = 0;
  std::uint64_t probes = 0;
};

// Stage k admits candidate order(k-1) and runs it with k units of fuel. A
// candidate left undecided at budget b is re-run from scratch at the first
// stage k >= 2b, with k units, so every candidate eventually gets any budget
// while a stuck one costs O(k) in total rather than O(k^2).
// A probe answering false or diverging provably is dropped.
// Returns the first success of the earliest stage that has one; results of a
// stage cut short by the global budget are discarded.
Verdict<Natural> dovetail_search(const std::function<Verdict<bool>(const Natural&, Fuel&)>& probe, Fuel& fuel,
                                 const DovetailOrder& order = {}, DovetailStats* stats = nullptr,
                                 std::uint64_t max_stage = 0);

template <class T>
struct Outcomes {
  std::vector<T> values;
  bool maybe_divergent = false;
  bool truncated = false;
  std::set<std::string> causes;  // why ↑ may be present or the set may be cut

  bool empty() const { return values.empty(); }
  bool singleton() const { return values.size() == 1 && !maybe_divergent; }
  void diverge(const std::string& cause) {
    maybe_divergent = true;
    causes.insert(cause);
  }
  void truncate(const std::string& cause) {
    truncated = true;
    causes.insert(cause);
  }
  template <class U>
  void merge_flags(const Outcomes<U>& o) {
    maybe_divergent |= o.maybe_divergent;
    truncated |= o.truncated;
    causes.insert(o.causes.begin(), o.causes.end());
  }
};

using OutcomeSet = Outcomes<Value>;
using StateSet = Outcomes<State>;
using StmtSet = Outcomes<StmtPtr>;
using ResultSet = Outcomes<ValueTuple>;

struct CompTree {
  struct Node {
    enum class Kind { Config, StateLeaf, DivLeaf };
    Kind kind = Kind::Config;
    State state;
    StmtPtr stmt;  // Config: statement still to run
    std::vector<std::size_t> children;
    bool expanded = false;
  };
  std::vector<Node> nodes;  // nodes[0] is the root
  bool truncated = false;

  std::size_t frontier() const;
  std::vector<State> leaves() const;
  bool has_div_leaf() const;
  // Same labels and children wherever this tree is expanded.
  bool is_prefix_of(const CompTree& other) const;
};

struct RunStats {
  std::uint64_t nodes = 0;
  std::uint64_t choose_evals = 0;
  std::uint64_t dovetail_probes = 0;
};

StmtPtr first(const StmtPtr& s);

// One run of the operational semantics over an algebra under one strategy.
// Keeps the oracle counter and statistics, so a Machine is not shared
// between threads.
class Machine {
 public:
  Machine(const PartialAlgebra& algebra, ChoiceStrategy strategy);

  OutcomeSet eval_term(const Term& t, const State& s, Fuel& fuel);
  StateSet eval_atomic(const Stmt& s, const State& st, Fuel& fuel);
  StmtSet rest(const StmtPtr& s, const State& st, Fuel& fuel);
  StateSet comp_step(const StmtPtr& s, const State& st, Fuel& fuel);
  CompTree comp_tree_stage(const StmtPtr& s, const State& st, unsigned n, Fuel& fuel);
  StateSet eval_stmt(const StmtPtr& s, const State& st, Fuel& fuel);
  ResultSet eval_proc(const Procedure& p, const ValueTuple& x, Fuel& fuel);
  // As eval_proc, starting from `initial` (inputs are still taken from x).
  ResultSet eval_proc_from(const Procedure& p, const ValueTuple& x, State initial, Fuel& fuel);

  State initial_state(const Procedure& p, const ValueTuple& x) const;
  const RunStats& stats() const { return stats_; }
  const ChoiceStrategy& strategy() const { return strategy_; }
  const PartialAlgebra& algebra() const { return algebra_; }

 private:
  OutcomeSet term(const Term& t, State& s, Fuel& fuel);
  OutcomeSet choose(const Term& t, State& s, Fuel& fuel);

  const PartialAlgebra& algebra_;
  ChoiceStrategy strategy_;
  DovetailOrder order_;
  std::uint64_t oracle_counter_ = 0;
  RunStats stats_;
};

// Convenience: a fresh Machine per call.
ResultSet run_procedure(const PartialAlgebra& a, const Procedure& p, const ValueTuple& x,
                        const ChoiceStrategy& strategy, std::uint64_t fuel);

struct DeterminismReport {
  struct Sample {
    ValueTuple input;
    ResultSet outcome;
    bool singleton = false;
  };
  std::vector<Sample> samples;
  bool all_singleton = true;
  // Enumerate bounds cap the check; a singleton here is not a proof.
  std::string scope = "bounded enumeration";
};

DeterminismReport is_deterministic_on(const PartialAlgebra& a, const Procedure& p,
                                      const std::vector<ValueTuple>& samples,
                                      const ChoiceStrategy& strategy = ChoiceStrategy::enumerate(),
                                      std::uint64_t fuel = 1'000'000);

class EliminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rewrites every choose into a least-number search loop. Requires a total
// algebra; preserves the semantics of procedures deterministic on it.
Procedure choose_eliminate(const Procedure& p, const PartialAlgebra& a);
Procedure choose_eliminate(const Procedure& p);

}  // namespace whilecc

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "whilecc/numeric.hpp"

namespace whilecc {

class ECode;
using ECodePtr = std::shared_ptr<const ECode>;

// Thrown when a producer cannot deliver a requested term.
class ProducerFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fast Cauchy sequence of rationals: |at(k) - at(n)| < 2^-n for k > n.
//
// Codes form a DAG. Leaves are constants or user sequence rules; inner nodes
// are exact arithmetic on limits. Inner nodes are evaluated by interval (ball)
// arithmetic at an adaptive working precision, so at(n) lies within 2^-(n+1)
// of the limit, which is enough for the fast Cauchy bound.
class ECode {
 public:
  using Rule = std::function<Rational(unsigned)>;
  enum class Kind { Constant, Sequence, Sum, Negate, Product, Reciprocal, Abs };

  static ECodePtr constant(const Rational& q);
  // Constant code whose every term is the enumeration index `k` of q.
  static ECodePtr constant_indexed(const Rational& q, Natural k);
  // `rule` must itself be fast Cauchy. `label` is the serialized form.
  static ECodePtr sequence(std::string label, Rule rule);
  static ECodePtr sum(ECodePtr a, ECodePtr b);
  static ECodePtr negate(ECodePtr a);
  static ECodePtr product(ECodePtr a, ECodePtr b);
  // Caller guarantees the limit of `a` is nonzero.
  static ECodePtr reciprocal(ECodePtr a);
  static ECodePtr absolute(ECodePtr a);

  ~ECode();
  ECode(const ECode&) = delete;
  ECode& operator=(const ECode&) = delete;

  Kind kind() const { return kind_; }
  const std::optional<Rational>& exact() const { return exact_; }
  const std::vector<ECodePtr>& operands() const { return kids_; }

  Rational at(unsigned n) const;
  // Index of at(n) under the canonical enumeration of Q.
  Natural index(unsigned n) const;
  // "const:<q>", "prog:<id>:<arg>", or a parenthesized expression.
  std::string describe() const;

  struct Ball {
    Rational center;
    Rational radius;
  };
  // Enclosure of the limit with working precision p; empty if a reciprocal
  // could not be separated from 0 at this precision.
  std::optional<Ball> enclose(long p) const;

 private:
  struct Private {};

 public:
  ECode(Private, Kind kind, std::vector<ECodePtr> kids);

 private:
  Rational term(unsigned n) const;

  Kind kind_;
  std::vector<ECodePtr> kids_;
  std::optional<Rational> exact_;
  std::optional<Natural> const_index_;
  std::string label_;
  Rule rule_;

  mutable std::mutex mu_;
  mutable std::map<unsigned, Rational> memo_;
};

// Result of checking the fast Cauchy bound on a finite prefix.
struct PrefixReport {
  bool ok = true;
  unsigned bad_n = 0;
  unsigned bad_k = 0;
  std::string detail;
};

// For all n < n_limit and n < k <= k_limit: |at(k) - at(n)| < 2^-n exactly.
PrefixReport validate_prefix(const ECode& e, unsigned n_limit = 12, unsigned k_limit = 14);

}  // namespace whilecc

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "whilecc/algebra.hpp"
#include "whilecc/ecode.hpp"
#include "whilecc/value.hpp"

namespace whilecc {

class InvalidCode : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when deciding membership needs more evaluation than allowed.
class PendingEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-sort partial surjection from naturals onto a subspace.
class Enumeration {
 public:
  struct Component {
    std::function<bool(const Natural&)> in_domain;
    std::function<Value(const Natural&)> decode;
  };

  explicit Enumeration(std::string name = "alpha") : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set(const Sort& s, Component c) { sorts_[s] = std::move(c); }
  bool covers(const Sort& s) const { return sorts_.count(s) > 0; }
  bool contains(const Sort& s, const Natural& k) const;
  // Throws InvalidCode when k is outside the domain.
  Value operator()(const Sort& s, const Natural& k) const;

 private:
  std::string name_;
  std::map<Sort, Component> sorts_;
};

// bool: {0,1} with 0 = ff; nat: identity on all naturals.
void add_base_sorts(Enumeration& e);

// Canonical enumeration of Q at sort real (and, identically, interval codes
// of rationals in [0,1]).
Enumeration alpha_rat();

// Append-only table of e-codes; indices are stable for the session.
class CodeStore {
 public:
  Natural add(ECodePtr e);
  ECodePtr at(const Natural& index) const;
  bool contains(const Natural& index) const;
  std::size_t size() const;
  // Fast Cauchy prefix check, cached per index.
  bool validated(const Natural& index) const;

 private:
  mutable std::mutex mu_;
  std::vector<ECodePtr> codes_;
  mutable std::map<std::size_t, bool> checked_;
};

// e_con[k]: the constant sequence at index k. Requires alpha(k) rational.
ECodePtr const_code(const Enumeration& alpha, const Natural& k);

// A Cauchy sequence with an explicit modulus of convergence.
struct CCode {
  std::string label;
  std::function<Rational(const Natural&)> sequence;
  std::function<Natural(unsigned)> modulus;
};

// {e'}(n) = {e}(m'(n)) with m' the running maximum of the modulus. Throws
// InvalidCode when the result fails the prefix check.
ECodePtr c_to_e(const CCode& c);
Rational ecode_eval_via_modulus(const CCode& c, unsigned n);

Rational ecode_eval(const ECode& e, unsigned n);

// {e''}(n) = {level(n+2)}(n+2), the shifted diagonal. Each level's limit must be
// within 2^-n of a common target.
ECodePtr diagonal_code(std::function<ECodePtr(unsigned)> level, std::string label = "diag");

// Enumeration over a code store: Omega = stored indices passing the prefix check.
Enumeration computable_closure(const Enumeration& alpha, std::shared_ptr<const CodeStore> store);

// Goedel coding of closed terms over generator constants and the homogeneous
// operations of each sort.
class TermCoding {
 public:
  TermCoding(const Signature& sig, const std::map<Sort, std::vector<std::string>>& generators);
  ClosedTerm term(const Sort& s, const Natural& k) const;
  Natural index(const Sort& s, const ClosedTerm& t) const;
  const std::vector<std::string>& symbols(const Sort& s) const;

 private:
  std::map<Sort, std::vector<std::string>> symbols_;
  std::map<std::string, std::size_t> arity_;
};

// alpha = evalG . enum_Sigma; terms whose evaluation is ProvenDivergent are
// outside Omega. Membership queries that exhaust `fuel` throw PendingEvaluation.
Enumeration canonical_enum(const Signature& sig, std::shared_ptr<const PartialAlgebra> a,
                           const std::map<Sort, std::vector<std::string>>& generators, std::uint64_t fuel = 100000);

// Named and serialized codes: "const:<q>", "prog:<id>:<arg>", and aliases such
// as "sqrt2" and "e".
class CodeRegistry {
 public:
  using Factory = std::function<ECodePtr(const std::string& arg)>;
  static CodeRegistry& instance();
  void add_family(const std::string& id, Factory f);
  void add_alias(const std::string& name, const std::string& serialized);
  bool has_family(const std::string& id) const;
  // Throws InvalidCode for unknown names or malformed text.
  ECodePtr parse(const std::string& text) const;

 private:
  CodeRegistry();
  mutable std::mutex mu_;
  std::map<std::string, Factory> families_;
  std::map<std::string, std::string> aliases_;
};

// Left endpoint of exact bisection for sqrt(q) after n+1 halvings.
ECodePtr sqrt_code(const Rational& q);
// Taylor partial sums of exp(q) with a certified tail bound.
ECodePtr exp_code(const Rational& q);

}  // namespace whilecc

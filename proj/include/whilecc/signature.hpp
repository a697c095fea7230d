#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace whilecc {

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Sort {
 public:
  enum class Kind { Bool, Nat, Real, Interval, User };

  static Sort boolean() { return Sort(Kind::Bool, "bool"); }
  static Sort nat() { return Sort(Kind::Nat, "nat"); }
  static Sort real() { return Sort(Kind::Real, "real"); }
  static Sort interval() { return Sort(Kind::Interval, "interval"); }
  static Sort user(std::string name);
  // "real", "real*", ... ; throws SignatureError on unknown shapes.
  static Sort parse(const std::string& text);

  Sort star() const;
  bool starred() const { return starred_; }
  Sort element() const;
  Kind kind() const { return kind_; }
  std::string name() const { return starred_ ? base_ + "*" : base_; }
  // Name used as a symbol suffix: "real", "real_star".
  std::string tag() const { return starred_ ? base_ + "_star" : base_; }

  bool is_bool() const { return !starred_ && kind_ == Kind::Bool; }
  bool is_nat() const { return !starred_ && kind_ == Kind::Nat; }

  auto operator<=>(const Sort&) const = default;
  bool operator==(const Sort&) const = default;

 private:
  Sort(Kind k, std::string base) : kind_(k), base_(std::move(base)) {}
  Kind kind_;
  std::string base_;
  bool starred_ = false;
};

struct FuncSymbol {
  std::string name;    // unique within a signature, e.g. "less_real"
  std::string family;  // overload family used by the surface syntax, e.g. "less"
  std::vector<Sort> args;
  Sort result = Sort::boolean();
  bool partial = false;
  bool conditional = false;  // if_s: non-strict in its branches

  std::size_t arity() const { return args.size(); }
  bool operator==(const FuncSymbol& o) const { return name == o.name; }
};

struct ClosedTerm {
  std::string symbol;
  std::vector<ClosedTerm> args;
  std::string to_string() const;
};

class Signature {
 public:
  // `default_term` must be a closed term of `s` over symbols added later or
  // already present; it is checked by validate().
  void add_sort(const Sort& s, ClosedTerm default_term);
  void add_symbol(FuncSymbol f);
  void mark_partial(const std::string& name);
  void declare_equality(const Sort& s) { equality_.insert(s); }
  void declare_order(const Sort& s) { order_.insert(s); }

  bool has_sort(const Sort& s) const;
  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::map<std::string, FuncSymbol>& symbols() const { return symbols_; }
  const FuncSymbol* find(const std::string& name) const;
  const FuncSymbol& at(const std::string& name) const;
  std::vector<const FuncSymbol*> family(const std::string& fam) const;
  const std::set<Sort>& equality_sorts() const { return equality_; }
  const std::set<Sort>& order_sorts() const { return order_; }

  bool standard() const { return standard_; }
  bool n_standard() const { return n_standard_; }
  bool starred() const { return starred_; }

  const ClosedTerm& default_term(const Sort& s) const;
  // Sort of a closed term, or an error.
  Sort sort_of(const ClosedTerm& t) const;

  // Every invariant violation, one message each; empty when valid.
  std::vector<std::string> validate() const;

 private:
  friend Signature standardise(const Signature&);
  friend Signature n_standardise(const Signature&);
  friend Signature star_signature(const Signature&);

  std::vector<Sort> sorts_;
  std::map<Sort, ClosedTerm> defaults_;
  std::map<std::string, FuncSymbol> symbols_;
  std::set<Sort> equality_;
  std::set<Sort> order_;
  bool standard_ = false;
  bool n_standard_ = false;
  bool starred_ = false;
};

Signature standardise(const Signature& sig);
Signature n_standardise(const Signature& sig);
Signature star_signature(const Signature& sig);
ClosedTerm default_term(const Signature& sig, const Sort& s);

// Conventional symbol names shared by the builtin algebras and the parser.
namespace sym {
std::string if_(const Sort& s);
std::string eq(const Sort& s);
std::string less(const Sort& s);
std::string null(const Sort& elem);
std::string lgth(const Sort& elem);
std::string ap(const Sort& elem);
std::string update(const Sort& elem);
std::string newlength(const Sort& elem);
}  // namespace sym

}  // namespace whilecc

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "whilecc/numeric.hpp"
#include "whilecc/signature.hpp"

namespace whilecc {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, App, Choose, Lit };

  Kind kind = Kind::Lit;
  Sort sort = Sort::boolean();
  std::string name;  // Var: variable; Choose: bound nat variable
  int slot = -1;     // frame slot of name
  FuncSymbol symbol;  // App
  std::vector<TermPtr> args;  // App arguments; Choose: {body}
  Rational literal;  // Lit: value of the numeral closed term
  SourceLoc loc;

  static TermPtr var(std::string name, int slot, Sort sort, SourceLoc loc = {});
  static TermPtr app(FuncSymbol f, std::vector<TermPtr> args, SourceLoc loc = {});
  static TermPtr choose(std::string bound, int slot, TermPtr body, SourceLoc loc = {});
  static TermPtr lit(Sort sort, Rational q, SourceLoc loc = {});

  const Term& body() const { return *args.at(0); }
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum class Kind { Skip, Div, Assign, Seq, If, While };

  Kind kind = Kind::Skip;
  std::vector<std::string> lhs;  // Assign
  std::vector<int> lhs_slots;
  std::vector<TermPtr> rhs;
  TermPtr guard;  // If, While
  StmtPtr first;  // Seq: S1; If: then; While: body
  StmtPtr second;  // Seq: S2; If: else
  SourceLoc loc;

  bool atomic() const { return kind == Kind::Skip || kind == Kind::Div || kind == Kind::Assign; }

  static StmtPtr skip(SourceLoc loc = {});
  static StmtPtr div(SourceLoc loc = {});
  static StmtPtr assign(std::vector<std::string> lhs, std::vector<int> slots, std::vector<TermPtr> rhs,
                        SourceLoc loc = {});
  static StmtPtr seq(StmtPtr s1, StmtPtr s2);
  static StmtPtr if_(TermPtr guard, StmtPtr then_s, StmtPtr else_s, SourceLoc loc = {});
  static StmtPtr while_(TermPtr guard, StmtPtr body, SourceLoc loc = {});
};

struct VarDecl {
  std::string name;
  Sort sort = Sort::nat();
};

struct Procedure {
  std::string name;
  std::string algebra = "RN*";
  std::vector<VarDecl> in, out, aux;
  StmtPtr body;
  bool star_restricted = false;

  // Frame layout: in, then out, then aux.
  std::vector<VarDecl> frame() const;
  int slot_of(const std::string& var) const;  // -1 when undeclared
  std::vector<Sort> input_sorts() const;
  std::vector<Sort> output_sorts() const;
};

bool equal(const Term& a, const Term& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const Procedure& a, const Procedure& b);

// Replaces free occurrences of `var` (a choose binding the same name shadows it).
TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& replacement);
bool contains_choose(const Term& t);
bool contains_choose(const Stmt& s);

}  // namespace whilecc

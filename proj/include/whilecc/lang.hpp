#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "whilecc/algebra.hpp"
#include "whilecc/ast.hpp"

namespace whilecc {

struct Diagnostic {
  enum class Kind { Lexical, Syntax, Sort, WellFormed };
  Kind kind = Kind::Syntax;
  SourceLoc loc;
  std::string code;  // stable identifier, e.g. "input-assigned"
  std::string message;
  std::string to_string() const;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d);
  const Diagnostic& diagnostic() const { return d_; }

 private:
  Diagnostic d_;
};

struct Program {
  std::string algebra_name = "RN*";
  AlgebraPtr algebra;
  std::vector<Procedure> procedures;

  const Procedure& procedure(const std::string& name) const;
};

// Source: optional "algebra NAME" header, then "def" term macros and "func"
// procedures. Every procedure is auto-initialised and validated.
Program parse_program(std::string_view text);
// A single procedure (the first one when the text holds several).
Procedure parse(std::string_view text);

// Prepends the default-term assignment to out and aux variables unless the
// body already starts with it.
Procedure auto_init(const Procedure& draft, const Signature& sig);
Procedure auto_init(const Procedure& draft);
bool starts_with_init(const Procedure& p, const Signature& sig);

// All well-formedness violations; empty when valid.
std::vector<Diagnostic> validate(const Procedure& p, const Signature& sig);

// In/out sorts must be unstarred; with sigma_only_io also not nat.
Procedure validate_star(const Procedure& p, bool sigma_only_io = false);

TermPtr to_term(const ClosedTerm& t, const Signature& sig);

std::string print(const Term& t);
std::string print(const Stmt& s, int indent = 0);
std::string print(const Procedure& p);
std::string print(const Program& p);

}  // namespace whilecc

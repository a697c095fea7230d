#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "whilecc/lang.hpp"

namespace whilecc {

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  os << loc.line << ":" << loc.column << ": " << code << ": " << message;
  return os.str();
}

ParseError::ParseError(Diagnostic d) : std::runtime_error(d.to_string()), d_(std::move(d)) {}

const Procedure& Program::procedure(const std::string& name) const {
  for (const auto& p : procedures)
    if (p.name == name) return p;
  throw std::out_of_range("no procedure named " + name);
}

namespace {

using Kind = Diagnostic::Kind;

[[noreturn]] void fail(Kind k, SourceLoc loc, std::string code, std::string msg) {
  throw ParseError(Diagnostic{k, loc, std::move(code), std::move(msg)});
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "algebra", "def", "func", "star", "in", "out", "aux", "begin", "end", "skip", "div",
      "if", "then", "else", "fi", "while", "do", "od", "for", "to", "choose", "rational",
      "and", "or", "not", "default"};
  return k;
}

// ---------------------------------------------------------------- lexer

struct Token {
  enum class T { Ident, Number, Sym, End };
  T type = T::End;
  std::string text;
  SourceLoc loc;
};

// After "name*": the star belongs to the name (x* as in the array-variable
// convention) unless an operand follows, which makes it a product.
bool starred_name_ends(std::string_view src, std::size_t k) {
  static const std::set<std::string, std::less<>> keywords = {"do", "od", "then", "else", "fi", "end", "and",
                                                              "or", "to", "begin", "aux", "out"};
  while (k < src.size() && (src[k] == ' ' || src[k] == '\t')) ++k;
  if (k >= src.size()) return true;
  const char c = src[k];
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::size_t e = k;
    while (e < src.size() && (std::isalnum(static_cast<unsigned char>(src[e])) || src[e] == '_')) ++e;
    return keywords.count(src.substr(k, e - k)) > 0;
  }
  return !(std::isdigit(static_cast<unsigned char>(c)) || c == '(' || c == '-' || c == '.');
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '{') {
      SourceLoc start{line, col};
      while (i < src.size() && src[i] != '}') advance(1);
      if (i >= src.size()) fail(Kind::Lexical, start, "unterminated-comment", "comment opened here never closes");
      advance(1);
      continue;
    }
    Token t;
    t.loc = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      if (j < src.size() && src[j] == '*' && starred_name_ends(src, j + 1)) ++j;
      t.type = Token::T::Ident;
      t.text = std::string(src.substr(i, j - i));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.type = Token::T::Number;
      t.text = std::string(src.substr(i, j - i));
    } else {
      static const char* two[] = {":=", "!=", "<=", ">="};
      t.type = Token::T::Sym;
      for (const char* s : two)
        if (src.substr(i, 2) == s) t.text = s;
      if (t.text.empty()) {
        if (std::string("()[],;:+-*/<>=").find(c) == std::string::npos)
          fail(Kind::Lexical, t.loc, "bad-character", std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
    }
    advance(t.text.size());
    out.push_back(std::move(t));
  }
  Token end;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

// ------------------------------------------------------- untyped terms

struct PTerm;
using PTermPtr = std::shared_ptr<const PTerm>;

struct PTerm {
  enum class K { Num, Ident, Call, Choose, Neg, Bin, Default };
  K k = K::Num;
  std::string text;  // Ident / Call name / Bin operator
  std::vector<PTermPtr> kids;
  Rational num;
  std::vector<std::string> bound;  // Choose
  bool rational = false;           // Choose over rationals
  SourceLoc loc;
};

PTermPtr mk(PTerm::K k, SourceLoc loc, std::string text = {}, std::vector<PTermPtr> kids = {}) {
  auto t = std::make_shared<PTerm>();
  t->k = k;
  t->loc = loc;
  t->text = std::move(text);
  t->kids = std::move(kids);
  return t;
}

PTermPtr mk_num(SourceLoc loc, Rational q) {
  auto t = std::make_shared<PTerm>();
  t->k = PTerm::K::Num;
  t->loc = loc;
  t->num = std::move(q);
  return t;
}

struct Macro {
  std::vector<VarDecl> params;
  Sort result = Sort::real();
  PTermPtr body;
  SourceLoc loc;
};

// Identifier bindings visible while typing a term.
struct Scope {
  int id = 0;
  bool macro = false;  // macro bodies do not see procedure variables
  std::map<std::string, TermPtr> bindings;
};

// ---------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program program() {
    Program prog;
    if (is_word("algebra")) {
      next();
      Token name = expect_ident("algebra name");
      std::string n = name.text;
      if (accept_sym("*")) n += "*";
      prog.algebra_name = n;
      try {
        prog.algebra = shared_builtin(n);
      } catch (const std::exception& e) {
        fail(Kind::Syntax, name.loc, "unknown-algebra", e.what());
      }
    } else {
      prog.algebra = shared_builtin(prog.algebra_name);
    }
    sig_ = &prog.algebra->signature();
    algebra_name_ = prog.algebra_name;
    while (peek().type != Token::T::End) {
      if (is_word("def")) {
        macro_def();
      } else if (is_word("func")) {
        prog.procedures.push_back(procedure());
      } else {
        fail(Kind::Syntax, peek().loc, "syntax", "expected 'def' or 'func', found '" + describe(peek()) + "'");
      }
    }
    if (prog.procedures.empty()) fail(Kind::Syntax, peek().loc, "syntax", "no procedure in source");
    return prog;
  }

 private:
  // ------------------------------------------------------------ tokens
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  static std::string describe(const Token& t) { return t.type == Token::T::End ? "end of input" : t.text; }
  bool is_word(const std::string& w, std::size_t ahead = 0) const {
    return peek(ahead).type == Token::T::Ident && peek(ahead).text == w;
  }
  bool is_sym(const std::string& s, std::size_t ahead = 0) const {
    return peek(ahead).type == Token::T::Sym && peek(ahead).text == s;
  }
  bool accept_sym(const std::string& s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }
  bool accept_word(const std::string& w) {
    if (!is_word(w)) return false;
    next();
    return true;
  }
  void expect_sym(const std::string& s) {
    if (!accept_sym(s)) fail(Kind::Syntax, peek().loc, "syntax", "expected '" + s + "', found '" + describe(peek()) + "'");
  }
  void expect_word(const std::string& w) {
    if (!accept_word(w)) fail(Kind::Syntax, peek().loc, "syntax", "expected '" + w + "', found '" + describe(peek()) + "'");
  }
  Token expect_ident(const std::string& what) {
    const Token& t = peek();
    if (t.type != Token::T::Ident || keywords().count(t.text))
      fail(Kind::Syntax, t.loc, "syntax", "expected " + what + ", found '" + describe(t) + "'");
    return next();
  }

  Sort sort_spec() {
    Token t = expect_ident("sort");
    std::string text = t.text;
    if (accept_sym("*")) text += "*";
    Sort s = Sort::nat();
    try {
      s = Sort::parse(text);
    } catch (const std::exception&) {
      fail(Kind::Sort, t.loc, "unknown-sort", "unknown sort '" + text + "'");
    }
    if (!sig_->has_sort(s))
      fail(Kind::Sort, t.loc, "unknown-sort", "sort '" + text + "' is not in algebra " + algebra_name_);
    return s;
  }

  // name (, name)* : sort  (, group)*
  std::vector<VarDecl> decls() {
    std::vector<VarDecl> out;
    do {
      std::vector<Token> names{expect_ident("variable name")};
      while (accept_sym(",")) names.push_back(expect_ident("variable name"));
      expect_sym(":");
      Sort s = sort_spec();
      for (const auto& n : names) {
        out.push_back({n.text, s});
        decl_locs_[n.text] = n.loc;
      }
    } while (accept_sym(","));
    return out;
  }

  // ------------------------------------------------------------ macros
  void macro_def() {
    expect_word("def");
    Token name = expect_ident("macro name");
    if (macros_.count(name.text) || sig_->find(name.text))
      fail(Kind::WellFormed, name.loc, "duplicate-definition", "'" + name.text + "' is already defined");
    Macro m;
    m.loc = name.loc;
    expect_sym("(");
    if (!is_sym(")")) m.params = decls();
    expect_sym(")");
    expect_sym(":");
    m.result = sort_spec();
    expect_sym("=");
    m.body = expr();
    macros_[name.text] = std::move(m);
  }

  // ------------------------------------------------------------ procedures
  Procedure procedure() {
    Token head = next();  // func
    proc_ = Procedure{};
    proc_.algebra = algebra_name_;
    decl_locs_.clear();
    fresh_for_.clear();
    memo_.clear();
    bool restricted = accept_word("star");
    if (peek().type == Token::T::Ident && !keywords().count(peek().text)) proc_.name = next().text;
    if (accept_word("in")) proc_.in = decls();
    if (accept_word("out")) proc_.out = decls();
    if (accept_word("aux")) proc_.aux = decls();
    expect_word("begin");
    StmtPtr body = stmts();
    expect_word("end");
    proc_.body = body;

    Procedure p = auto_init(proc_, *sig_);
    auto diags = validate(p, *sig_);
    if (!diags.empty()) {
      Diagnostic d = diags.front();
      if (d.loc.line == 0) {
        auto it = decl_locs_.find(d.message.substr(1, d.message.find('\'', 1) - 1));
        d.loc = it != decl_locs_.end() ? it->second : head.loc;
      }
      throw ParseError(d);
    }
    if (restricted) {
      try {
        p = validate_star(p);
      } catch (const ParseError& e) {
        Diagnostic d = e.diagnostic();
        auto it = decl_locs_.find(d.message.substr(1, d.message.find('\'', 1) - 1));
        d.loc = it != decl_locs_.end() ? it->second : head.loc;
        throw ParseError(d);
      }
    }
    return p;
  }

  // ------------------------------------------------------------ statements
  bool at_block_end() const {
    return is_word("end") || is_word("od") || is_word("fi") || is_word("else") || peek().type == Token::T::End;
  }

  StmtPtr stmts() {
    std::vector<StmtPtr> list;
    if (at_block_end()) fail(Kind::Syntax, peek().loc, "syntax", "empty statement list (use 'skip')");
    list.push_back(stmt());
    while (accept_sym(";")) {
      if (at_block_end()) break;
      list.push_back(stmt());
    }
    if (!at_block_end())
      fail(Kind::Syntax, peek().loc, "syntax", "expected ';' or end of block, found '" + describe(peek()) + "'");
    StmtPtr s = list.back();
    for (std::size_t i = list.size() - 1; i-- > 0;) s = Stmt::seq(list[i], s);
    return s;
  }

  StmtPtr stmt() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    if (accept_word("skip")) return Stmt::skip(loc);
    if (accept_word("div")) return Stmt::div(loc);
    if (accept_word("if")) {
      TermPtr g = guard(expr(), "if");
      expect_word("then");
      StmtPtr a = stmts();
      StmtPtr b = accept_word("else") ? stmts() : Stmt::skip(peek().loc);
      expect_word("fi");
      return Stmt::if_(g, a, b, loc);
    }
    if (accept_word("while")) {
      TermPtr g = guard(expr(), "while");
      expect_word("do");
      StmtPtr body = stmts();
      expect_word("od");
      return Stmt::while_(g, body, loc);
    }
    if (accept_word("for")) return for_loop(loc);
    if (t.type == Token::T::Ident && !keywords().count(t.text)) return assignment();
    fail(Kind::Syntax, loc, "syntax", "expected a statement, found '" + describe(t) + "'");
  }

  TermPtr guard(const PTermPtr& g, const std::string& where) {
    Scope sc = top_scope();
    try {
      return check(g, Sort::boolean(), sc);
    } catch (const ParseError& e) {
      std::optional<Sort> got;
      try {
        got = check(g, std::nullopt, sc)->sort;
      } catch (const ParseError&) {
      }
      if (got && *got != Sort::boolean())
        fail(Kind::Sort, g->loc, "guard-not-bool", where + " guard has sort " + got->name() + ", not bool");
      throw;
    }
  }

  const VarDecl* lookup(const std::string& name) const {
    for (const auto* v : {&proc_.in, &proc_.out, &proc_.aux})
      for (const auto& d : *v)
        if (d.name == name) return &d;
    return nullptr;
  }

  TermPtr var_term(const std::string& name, SourceLoc loc) {
    const VarDecl* d = lookup(name);
    return Term::var(name, proc_.slot_of(name), d->sort, loc);
  }

  std::string fresh(const std::string& base) {
    for (;;) {
      std::string n = "_" + base + std::to_string(++fresh_count_);
      if (!lookup(n)) return n;
    }
  }

  void declare_aux(const std::string& name, Sort s) { proc_.aux.push_back({name, s}); }

  StmtPtr for_loop(SourceLoc loc) {
    Token v = expect_ident("loop variable");
    if (!lookup(v.text)) declare_aux(v.text, Sort::nat());
    const VarDecl* d = lookup(v.text);
    if (!d->sort.is_nat()) fail(Kind::Sort, v.loc, "sort-mismatch", "loop variable '" + v.text + "' must be nat");
    expect_sym(":=");
    Scope sc = top_scope();
    TermPtr lo = check(expr(), Sort::nat(), sc);
    expect_word("to");
    TermPtr hi = check(expr(), Sort::nat(), sc);
    expect_word("do");
    StmtPtr body = stmts();
    expect_word("od");
    std::string bound = fresh("hi");
    declare_aux(bound, Sort::nat());
    TermPtr iv = var_term(v.text, v.loc), bv = var_term(bound, loc);
    const FuncSymbol& less = sig_->at("less_nat");
    TermPtr g = Term::app(sig_->at("not"), {Term::app(less, {bv, iv}, loc)}, loc);
    StmtPtr step = Stmt::assign({v.text}, {iv->slot}, {Term::app(sig_->at("S"), {iv}, loc)}, loc);
    return Stmt::seq(Stmt::assign({v.text, bound}, {iv->slot, bv->slot}, {lo, hi}, loc),
                     Stmt::while_(g, Stmt::seq(body, step), loc));
  }

  StmtPtr assignment() {
    SourceLoc loc = peek().loc;
    std::vector<Token> lhs{next()};
    PTermPtr index;
    if (accept_sym("[")) {
      index = expr();
      expect_sym("]");
    }
    while (accept_sym(",")) {
      if (index) fail(Kind::Syntax, peek().loc, "syntax", "indexed assignment takes a single target");
      lhs.push_back(expect_ident("variable name"));
    }
    expect_sym(":=");
    for (const auto& l : lhs)
      if (!lookup(l.text)) fail(Kind::WellFormed, l.loc, "undeclared-variable", "'" + l.text + "' is not declared");

    if (is_word("choose") && lhs.size() > 1 && !index) return tuple_choose(lhs, loc);

    std::vector<PTermPtr> rhs{expr()};
    while (accept_sym(",")) rhs.push_back(expr());
    if (rhs.size() != lhs.size())
      fail(Kind::WellFormed, loc, "arity-mismatch",
           std::to_string(lhs.size()) + " targets but " + std::to_string(rhs.size()) + " values");
    if (index) rhs[0] = mk(PTerm::K::Call, loc, "Update", {mk(PTerm::K::Ident, lhs[0].loc, lhs[0].text), index, rhs[0]});

    Scope sc = top_scope();
    std::vector<std::string> names;
    std::vector<int> slots;
    std::vector<TermPtr> terms;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const VarDecl* d = lookup(lhs[i].text);
      names.push_back(d->name);
      slots.push_back(proc_.slot_of(d->name));
      terms.push_back(check_assigned(rhs[i], d->sort, sc));
    }
    return Stmt::assign(names, slots, terms, loc);
  }

  TermPtr check_assigned(const PTermPtr& t, const Sort& target, Scope& sc) {
    try {
      return check(t, target, sc);
    } catch (const ParseError&) {
      std::optional<Sort> got;
      try {
        got = check(t, std::nullopt, sc)->sort;
      } catch (const ParseError&) {
      }
      if (got && *got != target)
        fail(Kind::Sort, t->loc, "sort-mismatch", "value of sort " + got->name() + " assigned to " + target.name());
      throw;
    }
  }

  // x1, ..., xm := choose [rational] z1, ..., zm : b
  StmtPtr tuple_choose(const std::vector<Token>& lhs, SourceLoc loc) {
    PTermPtr c = expr();
    if (c->k != PTerm::K::Choose || c->bound.size() != lhs.size())
      fail(Kind::WellFormed, loc, "arity-mismatch", "tuple assignment needs a choose over as many variables");
    std::string z = fresh("z");
    declare_aux(z, Sort::nat());
    TermPtr zv = var_term(z, loc);
    Scope sc = top_scope();
    Scope inner = child(sc);
    std::vector<TermPtr> comps = projections(zv, c->bound.size(), loc);
    for (std::size_t i = 0; i < comps.size(); ++i) {
      TermPtr v = comps[i];
      if (c->rational) v = Term::app(sig_->at("rat"), {v}, loc);
      inner.bindings[c->bound[i]] = v;
    }
    TermPtr body = choose_body(c->kids[0], inner);
    StmtPtr pick = Stmt::assign({z}, {zv->slot}, {Term::choose(z, zv->slot, body, c->loc)}, loc);
    std::vector<std::string> names;
    std::vector<int> slots;
    std::vector<TermPtr> vals;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const VarDecl* d = lookup(lhs[i].text);
      TermPtr v = c->rational ? Term::app(sig_->at("rat"), {comps[i]}, loc) : comps[i];
      if (v->sort != d->sort)
        fail(Kind::Sort, lhs[i].loc, "sort-mismatch", "'" + d->name + "' has sort " + d->sort.name() + ", not " + v->sort.name());
      names.push_back(d->name);
      slots.push_back(proc_.slot_of(d->name));
      vals.push_back(v);
    }
    return Stmt::seq(pick, Stmt::assign(names, slots, vals, loc));
  }

  std::vector<TermPtr> projections(TermPtr z, std::size_t m, SourceLoc loc) {
    std::vector<TermPtr> out;
    TermPtr cur = z;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      out.push_back(Term::app(sig_->at("pi1_nat"), {cur}, loc));
      cur = Term::app(sig_->at("pi2_nat"), {cur}, loc);
    }
    out.push_back(cur);
    return out;
  }

  // ------------------------------------------------------------ expressions
  PTermPtr expr() { return or_expr(); }

  PTermPtr or_expr() {
    PTermPtr l = and_expr();
    while (is_word("or")) {
      SourceLoc loc = next().loc;
      l = mk(PTerm::K::Call, loc, "or", {l, and_expr()});
    }
    return l;
  }
  PTermPtr and_expr() {
    PTermPtr l = not_expr();
    while (is_word("and")) {
      SourceLoc loc = next().loc;
      l = mk(PTerm::K::Call, loc, "and", {l, not_expr()});
    }
    return l;
  }
  PTermPtr not_expr() {
    if (is_word("not") && !is_sym("(", 1)) {
      SourceLoc loc = next().loc;
      return mk(PTerm::K::Call, loc, "not", {not_expr()});
    }
    return cmp_expr();
  }
  PTermPtr cmp_expr() {
    PTermPtr l = add_expr();
    for (const char* op : {"<", ">", "=", "!=", "<=", ">="}) {
      if (is_sym(op)) {
        SourceLoc loc = next().loc;
        return mk(PTerm::K::Bin, loc, op, {l, add_expr()});
      }
    }
    return l;
  }
  PTermPtr add_expr() {
    PTermPtr l = mul_expr();
    while (is_sym("+") || is_sym("-")) {
      Token op = next();
      l = mk(PTerm::K::Bin, op.loc, op.text, {l, mul_expr()});
    }
    return l;
  }
  PTermPtr mul_expr() {
    PTermPtr l = unary();
    while (is_sym("*") || is_sym("/")) {
      Token op = next();
      PTermPtr r = unary();
      if (op.text == "/" && l->k == PTerm::K::Num && r->k == PTerm::K::Num) {
        if (r->num == 0) fail(Kind::Syntax, op.loc, "division-by-zero", "literal division by zero");
        l = mk_num(l->loc, l->num / r->num);
        continue;
      }
      l = mk(PTerm::K::Bin, op.loc, op.text, {l, r});
    }
    return l;
  }
  PTermPtr unary() {
    if (is_sym("-")) {
      SourceLoc loc = next().loc;
      PTermPtr k = unary();
      if (k->k == PTerm::K::Num) return mk_num(loc, -k->num);
      return mk(PTerm::K::Neg, loc, "", {k});
    }
    PTermPtr p = primary();
    while (is_sym("[")) {
      SourceLoc loc = next().loc;
      PTermPtr i = expr();
      expect_sym("]");
      p = mk(PTerm::K::Call, loc, "Ap", {p, i});
    }
    return p;
  }
  PTermPtr primary() {
    const Token& t = peek();
    if (t.type == Token::T::Number) {
      Token n = next();
      return mk_num(n.loc, parse_rational(n.text));
    }
    if (accept_sym("(")) {
      PTermPtr e = expr();
      expect_sym(")");
      return e;
    }
    if (is_word("default")) return mk(PTerm::K::Default, next().loc);
    if (is_word("choose")) return choose_expr();
    static const std::set<std::string> callable = {"if", "not", "and", "or"};
    if (t.type == Token::T::Ident && (!keywords().count(t.text) || (callable.count(t.text) && is_sym("(", 1)))) {
      Token id = next();
      if (accept_sym("(")) {
        std::vector<PTermPtr> args;
        if (!is_sym(")")) {
          args.push_back(expr());
          while (accept_sym(",")) args.push_back(expr());
        }
        expect_sym(")");
        return mk(PTerm::K::Call, id.loc, id.text, std::move(args));
      }
      return mk(PTerm::K::Ident, id.loc, id.text);
    }
    fail(Kind::Syntax, t.loc, "syntax", "expected a term, found '" + describe(t) + "'");
  }
  PTermPtr choose_expr() {
    SourceLoc loc = next().loc;
    auto c = std::make_shared<PTerm>();
    c->k = PTerm::K::Choose;
    c->loc = loc;
    c->rational = accept_word("rational");
    c->bound.push_back(expect_ident("choose variable").text);
    while (accept_sym(",")) c->bound.push_back(expect_ident("choose variable").text);
    expect_sym(":");
    c->kids.push_back(expr());
    return c;
  }

  // ------------------------------------------------------------ typing
  Scope top_scope() { return Scope{++scope_count_, false, {}}; }
  Scope child(const Scope& s) {
    Scope c = s;
    c.id = ++scope_count_;
    return c;
  }

  TermPtr check(const PTermPtr& t, const std::optional<Sort>& want, Scope& sc) {
    std::string key = std::to_string(reinterpret_cast<std::uintptr_t>(t.get())) + "/" + std::to_string(sc.id) + "/" +
                      (want ? want->name() : "?");
    keep_.push_back(t);
    auto it = memo_.find(key);
    if (it != memo_.end()) {
      if (it->second.term) return it->second.term;
      throw ParseError(it->second.error);
    }
    try {
      TermPtr r = check_uncached(t, want, sc);
      if (want && r->sort != *want)
        fail(Kind::Sort, t->loc, "sort-mismatch", "expected " + want->name() + ", found " + r->sort.name());
      memo_[key] = {r, {}};
      return r;
    } catch (const ParseError& e) {
      memo_[key] = {nullptr, e.diagnostic()};
      throw;
    }
  }

  TermPtr literal(const PTermPtr& t, const std::optional<Sort>& want) {
    const bool integral = t->num.get_den() == 1 && t->num >= 0;
    std::optional<Sort> s = want;
    if (!s) s = integral && sig_->has_sort(Sort::nat()) ? Sort::nat() : Sort::real();
    if (s->is_nat() && integral && sig_->has_sort(*s)) return Term::lit(*s, t->num, t->loc);
    if (*s == Sort::real() && sig_->has_sort(*s)) return Term::lit(*s, t->num, t->loc);
    fail(Kind::Sort, t->loc, "bad-literal", "numeral " + whilecc::to_string(t->num) + " is not a " + s->name());
  }

  TermPtr check_uncached(const PTermPtr& t, const std::optional<Sort>& want, Scope& sc) {
    switch (t->k) {
      case PTerm::K::Num:
        return literal(t, want);
      case PTerm::K::Default: {
        if (!want) fail(Kind::Sort, t->loc, "sort-mismatch", "'default' needs a known sort");
        if (!sig_->has_sort(*want)) fail(Kind::Sort, t->loc, "unknown-sort", "no default for " + want->name());
        return to_term(sig_->default_term(*want), *sig_);
      }
      case PTerm::K::Ident: {
        auto b = sc.bindings.find(t->text);
        if (b != sc.bindings.end()) return b->second;
        if (!sc.macro && lookup(t->text)) return var_term(t->text, t->loc);
        if (sc.macro && lookup(t->text) && !sig_->find(t->text) && sig_->family(t->text).empty())
          fail(Kind::WellFormed, t->loc, "undeclared-variable", "macro body refers to variable '" + t->text + "'");
        return call(t, {}, want, sc);
      }
      case PTerm::K::Call:
        return call(t, t->kids, want, sc);
      case PTerm::K::Neg:
        return call(t, t->kids, want, sc, "neg");
      case PTerm::K::Choose:
        return choose(t, want, sc);
      case PTerm::K::Bin:
        return binary(t, want, sc);
    }
    fail(Kind::Syntax, t->loc, "syntax", "unhandled term");
  }

  TermPtr binary(const PTermPtr& t, const std::optional<Sort>& want, Scope& sc) {
    const std::string& op = t->text;
    const PTermPtr& a = t->kids[0];
    const PTermPtr& b = t->kids[1];
    auto call2 = [&](const std::string& f, PTermPtr x, PTermPtr y) { return mk(PTerm::K::Call, t->loc, f, {x, y}); };
    auto neg1 = [&](PTermPtr x) { return mk(PTerm::K::Call, t->loc, "not", {x}); };
    PTermPtr d;
    if (op == "+") d = call2("add", a, b);
    else if (op == "*") d = call2("mul", a, b);
    else if (op == "<") d = call2("less", a, b);
    else if (op == ">") d = call2("less", b, a);
    else if (op == "=") d = call2("eq", a, b);
    else if (op == "!=") d = neg1(call2("eq", a, b));
    else if (op == "<=") d = neg1(call2("less", b, a));
    else if (op == ">=") d = neg1(call2("less", a, b));
    else if (op == "/") d = call2("mul", a, mk(PTerm::K::Call, t->loc, "inv", {b}));
    else if (op == "-") {
      try {
        if (!sig_->family("monus").empty()) {
          keep_.push_back(call2("monus", a, b));
          return check(keep_.back(), want, sc);
        }
      } catch (const ParseError&) {
      }
      d = call2("add", a, mk(PTerm::K::Neg, t->loc, "", {b}));
    }
    if (!d) fail(Kind::Syntax, t->loc, "syntax", "unknown operator " + op);
    keep_.push_back(d);
    return check(d, want, sc);
  }

  TermPtr choose(const PTermPtr& t, const std::optional<Sort>& want, Scope& sc) {
    if (t->bound.size() != 1)
      fail(Kind::WellFormed, t->loc, "tuple-choose", "choose over several variables only as a whole assignment");
    const std::string& v = t->bound[0];
    Scope inner = child(sc);
    if (t->rational) {
      auto f = fresh_for_.find(t.get());
      if (f == fresh_for_.end()) {
        std::string z = fresh("q");
        declare_aux(z, Sort::nat());
        f = fresh_for_.emplace(t.get(), z).first;
      }
      TermPtr zv = var_term(f->second, t->loc);
      inner.bindings[v] = Term::app(sig_->at("rat"), {zv}, t->loc);
      TermPtr body = choose_body(t->kids[0], inner);
      TermPtr r = Term::app(sig_->at("rat"), {Term::choose(zv->name, zv->slot, body, t->loc)}, t->loc);
      (void)want;
      return r;
    }
    const VarDecl* d = lookup(v);
    if (!d) {
      if (keywords().count(v) || sig_->find(v))
        fail(Kind::WellFormed, t->loc, "choose-sort", "'" + v + "' cannot be a choose variable");
      declare_aux(v, Sort::nat());
      d = lookup(v);
    }
    if (!d->sort.is_nat())
      fail(Kind::Sort, t->loc, "choose-sort", "choose variable '" + v + "' has sort " + d->sort.name() + ", not nat");
    TermPtr zv = var_term(v, t->loc);
    inner.bindings[v] = zv;
    TermPtr body = choose_body(t->kids[0], inner);
    return Term::choose(v, zv->slot, body, t->loc);
  }

  TermPtr choose_body(const PTermPtr& b, Scope& sc) {
    try {
      return check(b, Sort::boolean(), sc);
    } catch (const ParseError&) {
      std::optional<Sort> got;
      try {
        got = check(b, std::nullopt, sc)->sort;
      } catch (const ParseError&) {
      }
      if (got && *got != Sort::boolean())
        fail(Kind::Sort, b->loc, "choose-sort", "choose body has sort " + got->name() + ", not bool");
      throw;
    }
  }

  // Function application: macros, then exact symbols, then overload families.
  TermPtr call(const PTermPtr& t, const std::vector<PTermPtr>& kids, const std::optional<Sort>& want, Scope& sc,
               std::string name = {}) {
    if (name.empty()) name = t->text;
    if (auto m = macros_.find(name); m != macros_.end()) return expand(t, m->second, kids, sc);
    if (const FuncSymbol* f = sig_->find(name)) return apply(*f, kids, t->loc, sc);

    std::vector<const FuncSymbol*> cands;
    for (const FuncSymbol* f : sig_->family(name))
      if (f->arity() == kids.size()) cands.push_back(f);
    if (cands.empty()) {
      if (!sig_->family(name).empty())
        fail(Kind::Sort, t->loc, "arity-mismatch", "'" + name + "' does not take " + std::to_string(kids.size()) + " arguments");
      if (kids.empty() && keywords().count(name) == 0)
        fail(Kind::WellFormed, t->loc, "undeclared-variable", "'" + name + "' is not declared");
      fail(Kind::Sort, t->loc, "unknown-symbol", "no function named '" + name + "' in algebra " + algebra_name_);
    }
    std::stable_sort(cands.begin(), cands.end(), [](const FuncSymbol* x, const FuncSymbol* y) {
      return std::tie(x->result, x->args) < std::tie(y->result, y->args);
    });
    std::optional<ParseError> only;
    for (const FuncSymbol* f : cands) {
      if (want && f->result != *want) continue;
      try {
        return apply(*f, kids, t->loc, sc);
      } catch (const ParseError& e) {
        if (!only) only = e;
      }
    }
    int live = 0;
    for (const FuncSymbol* f : cands) live += !want || f->result == *want;
    if (live == 1 && only) throw *only;
    std::string want_s = want ? " with result " + want->name() : "";
    fail(Kind::Sort, t->loc, "sort-mismatch", "no overload of '" + name + "'" + want_s + " fits these arguments");
  }

  TermPtr apply(const FuncSymbol& f, const std::vector<PTermPtr>& kids, SourceLoc loc, Scope& sc) {
    if (kids.size() != f.arity())
      fail(Kind::Sort, loc, "arity-mismatch",
           "'" + f.name + "' takes " + std::to_string(f.arity()) + " arguments, not " + std::to_string(kids.size()));
    std::vector<TermPtr> args;
    for (std::size_t i = 0; i < kids.size(); ++i) args.push_back(check(kids[i], f.args[i], sc));
    return Term::app(f, std::move(args), loc);
  }

  TermPtr expand(const PTermPtr& t, const Macro& m, const std::vector<PTermPtr>& kids, Scope& sc) {
    if (kids.size() != m.params.size())
      fail(Kind::Sort, t->loc, "arity-mismatch",
           "'" + t->text + "' takes " + std::to_string(m.params.size()) + " arguments");
    if (++depth_ > 64) fail(Kind::WellFormed, t->loc, "macro-recursion", "macro expansion too deep");
    Scope body{++scope_count_, true, {}};
    for (std::size_t i = 0; i < kids.size(); ++i) body.bindings[m.params[i].name] = check(kids[i], m.params[i].sort, sc);
    TermPtr r = check(m.body, m.result, body);
    --depth_;
    return r;
  }

  struct MemoEntry {
    TermPtr term;
    Diagnostic error;
  };

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature* sig_ = nullptr;
  std::string algebra_name_;
  std::map<std::string, Macro> macros_;
  Procedure proc_;
  std::map<std::string, SourceLoc> decl_locs_;
  std::map<const PTerm*, std::string> fresh_for_;
  std::map<std::string, MemoEntry> memo_;
  std::vector<PTermPtr> keep_;  // memo keys are node addresses, so nodes stay alive
  int fresh_count_ = 0;
  int scope_count_ = 0;
  int depth_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }

Procedure parse(std::string_view text) { return parse_program(text).procedures.front(); }

}  // namespace whilecc

#include "whilecc/ast.hpp"

namespace whilecc {

TermPtr Term::var(std::string name, int slot, Sort sort, SourceLoc loc) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->name = std::move(name);
  t->slot = slot;
  t->sort = std::move(sort);
  t->loc = loc;
  return t;
}

TermPtr Term::app(FuncSymbol f, std::vector<TermPtr> args, SourceLoc loc) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::App;
  t->sort = f.result;
  t->symbol = std::move(f);
  t->args = std::move(args);
  t->loc = loc;
  return t;
}

TermPtr Term::choose(std::string bound, int slot, TermPtr body, SourceLoc loc) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Choose;
  t->sort = Sort::nat();
  t->name = std::move(bound);
  t->slot = slot;
  t->args = {std::move(body)};
  t->loc = loc;
  return t;
}

TermPtr Term::lit(Sort sort, Rational q, SourceLoc loc) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Lit;
  t->sort = std::move(sort);
  q.canonicalize();
  t->literal = std::move(q);
  t->loc = loc;
  return t;
}

StmtPtr Stmt::skip(SourceLoc loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Skip;
  s->loc = loc;
  return s;
}

StmtPtr Stmt::div(SourceLoc loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Div;
  s->loc = loc;
  return s;
}

StmtPtr Stmt::assign(std::vector<std::string> lhs, std::vector<int> slots, std::vector<TermPtr> rhs, SourceLoc loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Assign;
  s->lhs = std::move(lhs);
  s->lhs_slots = std::move(slots);
  s->rhs = std::move(rhs);
  s->loc = loc;
  return s;
}

StmtPtr Stmt::seq(StmtPtr s1, StmtPtr s2) {
  // Kept right-nested so printing and re-parsing give the same tree.
  if (s1->kind == Kind::Seq) return seq(s1->first, seq(s1->second, std::move(s2)));
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Seq;
  s->loc = s1->loc;
  s->first = std::move(s1);
  s->second = std::move(s2);
  return s;
}

StmtPtr Stmt::if_(TermPtr guard, StmtPtr then_s, StmtPtr else_s, SourceLoc loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::If;
  s->guard = std::move(guard);
  s->first = std::move(then_s);
  s->second = std::move(else_s);
  s->loc = loc;
  return s;
}

StmtPtr Stmt::while_(TermPtr guard, StmtPtr body, SourceLoc loc) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::While;
  s->guard = std::move(guard);
  s->first = std::move(body);
  s->loc = loc;
  return s;
}

std::vector<VarDecl> Procedure::frame() const {
  std::vector<VarDecl> f = in;
  f.insert(f.end(), out.begin(), out.end());
  f.insert(f.end(), aux.begin(), aux.end());
  return f;
}

int Procedure::slot_of(const std::string& var) const {
  auto f = frame();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i].name == var) return static_cast<int>(i);
  return -1;
}

std::vector<Sort> Procedure::input_sorts() const {
  std::vector<Sort> out_s;
  for (const auto& d : in) out_s.push_back(d.sort);
  return out_s;
}

std::vector<Sort> Procedure::output_sorts() const {
  std::vector<Sort> out_s;
  for (const auto& d : out) out_s.push_back(d.sort);
  return out_s;
}

bool equal(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.sort != b.sort) return false;
  switch (a.kind) {
    case Term::Kind::Var: return a.name == b.name && a.slot == b.slot;
    case Term::Kind::Lit: return a.literal == b.literal;
    case Term::Kind::Choose: return a.name == b.name && a.slot == b.slot && equal(a.body(), b.body());
    case Term::Kind::App:
      if (a.symbol.name != b.symbol.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!equal(*a.args[i], *b.args[i])) return false;
      return true;
  }
  return false;
}

bool equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Div: return true;
    case Stmt::Kind::Assign:
      if (a.lhs != b.lhs || a.lhs_slots != b.lhs_slots || a.rhs.size() != b.rhs.size()) return false;
      for (std::size_t i = 0; i < a.rhs.size(); ++i)
        if (!equal(*a.rhs[i], *b.rhs[i])) return false;
      return true;
    case Stmt::Kind::Seq: return equal(*a.first, *b.first) && equal(*a.second, *b.second);
    case Stmt::Kind::If: return equal(*a.guard, *b.guard) && equal(*a.first, *b.first) && equal(*a.second, *b.second);
    case Stmt::Kind::While: return equal(*a.guard, *b.guard) && equal(*a.first, *b.first);
  }
  return false;
}

namespace {
bool same_decls(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].sort != b[i].sort) return false;
  return true;
}
}  // namespace

bool equal(const Procedure& a, const Procedure& b) {
  return a.name == b.name && a.algebra == b.algebra && same_decls(a.in, b.in) && same_decls(a.out, b.out) &&
         same_decls(a.aux, b.aux) && a.star_restricted == b.star_restricted && equal(*a.body, *b.body);
}

TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& replacement) {
  switch (t->kind) {
    case Term::Kind::Var: return t->name == var ? replacement : t;
    case Term::Kind::Lit: return t;
    case Term::Kind::Choose:
      if (t->name == var) return t;
      return Term::choose(t->name, t->slot, substitute(t->args[0], var, replacement), t->loc);
    case Term::Kind::App: {
      std::vector<TermPtr> args;
      for (const auto& a : t->args) args.push_back(substitute(a, var, replacement));
      return Term::app(t->symbol, std::move(args), t->loc);
    }
  }
  return t;
}

bool contains_choose(const Term& t) {
  if (t.kind == Term::Kind::Choose) return true;
  for (const auto& a : t.args)
    if (contains_choose(*a)) return true;
  return false;
}

bool contains_choose(const Stmt& s) {
  for (const auto& r : s.rhs)
    if (contains_choose(*r)) return true;
  if (s.guard && contains_choose(*s.guard)) return true;
  if (s.first && contains_choose(*s.first)) return true;
  if (s.second && contains_choose(*s.second)) return true;
  return false;
}

}  // namespace whilecc

#include <set>

#include "whilecc/lang.hpp"

namespace whilecc {

namespace {

using Kind = Diagnostic::Kind;

class Validator {
 public:
  Validator(const Procedure& p, const Signature& sig) : p_(p), sig_(sig), frame_(p.frame()) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> seen;
    for (const auto& d : frame_) {
      if (!seen.insert(d.name).second) add({}, "duplicate-variable", "'" + d.name + "' is declared more than once");
      if (!sig_.has_sort(d.sort)) add({}, "unknown-sort", "'" + d.name + "' has sort " + d.sort.name() + " outside the signature");
      if (const FuncSymbol* f = sig_.find(d.name); f && f->arity() == 0)
        add({}, "shadows-symbol", "'" + d.name + "' is also a constant symbol");
    }
    if (p_.star_restricted) {
      for (const auto* v : {&p_.in, &p_.out})
        for (const auto& d : *v)
          if (d.sort.starred()) add({}, "star-restriction", "'" + d.name + "' is an input or output of starred sort");
    }
    if (!p_.body) {
      add({}, "syntax", "'" + p_.name + "' has no body");
      return out_;
    }
    stmt(*p_.body);
    if (!starts_with_init(p_, sig_)) add(p_.body->loc, "missing-init", "'" + p_.name + "' does not begin with S_init");
    return out_;
  }

 private:
  void add(SourceLoc loc, std::string code, std::string msg, Kind k = Kind::WellFormed) {
    out_.push_back({k, loc, std::move(code), std::move(msg)});
  }

  bool slot_ok(int slot, const std::string& name, SourceLoc loc) {
    if (slot < 0 || slot >= static_cast<int>(frame_.size()) || frame_[slot].name != name) {
      add(loc, "undeclared-variable", "'" + name + "' is not a variable of '" + p_.name + "'");
      return false;
    }
    return true;
  }

  void term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Var:
        if (slot_ok(t.slot, t.name, t.loc) && frame_[t.slot].sort != t.sort)
          add(t.loc, "sort-mismatch", "'" + t.name + "' used at the wrong sort", Kind::Sort);
        return;
      case Term::Kind::Lit:
        if (!sig_.has_sort(t.sort) || !(t.sort.is_nat() || t.sort == Sort::real()) ||
            (t.sort.is_nat() && (t.literal.get_den() != 1 || t.literal < 0)))
          add(t.loc, "bad-literal", "numeral " + to_string(t.literal) + " at sort " + t.sort.name(), Kind::Sort);
        return;
      case Term::Kind::Choose:
        if (slot_ok(t.slot, t.name, t.loc) && !frame_[t.slot].sort.is_nat())
          add(t.loc, "choose-sort", "choose variable '" + t.name + "' is not nat", Kind::Sort);
        if (!t.sort.is_nat()) add(t.loc, "choose-sort", "choose term is not nat", Kind::Sort);
        term(t.body());
        if (t.body().sort != Sort::boolean()) add(t.loc, "choose-sort", "choose body is not bool", Kind::Sort);
        return;
      case Term::Kind::App: {
        const FuncSymbol* f = sig_.find(t.symbol.name);
        if (!f) {
          add(t.loc, "unknown-symbol", "'" + t.symbol.name + "' is not in the signature", Kind::Sort);
          return;
        }
        for (const auto& a : t.args) term(*a);
        bool ok = t.args.size() == f->arity() && t.sort == f->result;
        for (std::size_t i = 0; ok && i < t.args.size(); ++i) ok = t.args[i]->sort == f->args[i];
        if (!ok) add(t.loc, "sort-mismatch", "ill-sorted application of '" + f->name + "'", Kind::Sort);
        return;
      }
    }
  }

  void stmt(const Stmt& s0) {
    const Stmt* s = &s0;
    while (s->kind == Stmt::Kind::Seq) {
      stmt(*s->first);
      s = s->second.get();
    }
    switch (s->kind) {
      case Stmt::Kind::Skip:
      case Stmt::Kind::Div:
      case Stmt::Kind::Seq:
        return;
      case Stmt::Kind::Assign: {
        if (s->lhs.size() != s->rhs.size() || s->lhs.size() != s->lhs_slots.size()) {
          add(s->loc, "arity-mismatch", "assignment sides differ in length");
          return;
        }
        std::set<std::string> names;
        for (std::size_t i = 0; i < s->lhs.size(); ++i) {
          const std::string& v = s->lhs[i];
          if (!names.insert(v).second) add(s->loc, "lhs-not-distinct", "'" + v + "' appears twice on the left");
          term(*s->rhs[i]);
          if (!slot_ok(s->lhs_slots[i], v, s->loc)) continue;
          if (s->lhs_slots[i] < static_cast<int>(p_.in.size()))
            add(s->loc, "input-assigned", "input variable '" + v + "' is assigned");
          if (frame_[s->lhs_slots[i]].sort != s->rhs[i]->sort)
            add(s->loc, "sort-mismatch", "'" + v + "' assigned a " + s->rhs[i]->sort.name(), Kind::Sort);
        }
        return;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While:
        term(*s->guard);
        if (s->guard->sort != Sort::boolean()) add(s->loc, "guard-not-bool", "guard is not bool", Kind::Sort);
        stmt(*s->first);
        if (s->second) stmt(*s->second);
        return;
    }
  }

  const Procedure& p_;
  const Signature& sig_;
  std::vector<VarDecl> frame_;
  std::vector<Diagnostic> out_;
};

StmtPtr init_stmt(const Procedure& p, const Signature& sig) {
  std::vector<std::string> names;
  std::vector<int> slots;
  std::vector<TermPtr> rhs;
  int slot = static_cast<int>(p.in.size());
  for (const auto* v : {&p.out, &p.aux})
    for (const auto& d : *v) {
      names.push_back(d.name);
      slots.push_back(slot++);
      rhs.push_back(to_term(sig.default_term(d.sort), sig));
    }
  return Stmt::assign(names, slots, rhs, p.body ? p.body->loc : SourceLoc{});
}

}  // namespace

TermPtr to_term(const ClosedTerm& t, const Signature& sig) {
  std::vector<TermPtr> args;
  for (const auto& a : t.args) args.push_back(to_term(a, sig));
  return Term::app(sig.at(t.symbol), std::move(args));
}

bool starts_with_init(const Procedure& p, const Signature& sig) {
  if (p.out.empty() && p.aux.empty()) return true;
  if (!p.body) return false;
  const Stmt* s = p.body.get();
  while (s->kind == Stmt::Kind::Seq) s = s->first.get();
  if (s->kind != Stmt::Kind::Assign) return false;
  for (const auto& d : p.frame())
    if (!sig.has_sort(d.sort)) return false;
  StmtPtr init = init_stmt(p, sig);
  if (s->lhs != init->lhs || s->rhs.size() != init->rhs.size()) return false;
  for (std::size_t i = 0; i < s->rhs.size(); ++i)
    if (!equal(*s->rhs[i], *init->rhs[i])) return false;
  return true;
}

Procedure auto_init(const Procedure& draft, const Signature& sig) {
  if (starts_with_init(draft, sig)) return draft;
  Procedure p = draft;
  StmtPtr init = init_stmt(draft, sig);
  p.body = draft.body ? Stmt::seq(init, draft.body) : init;
  return p;
}

Procedure auto_init(const Procedure& draft) { return auto_init(draft, shared_builtin(draft.algebra)->signature()); }

std::vector<Diagnostic> validate(const Procedure& p, const Signature& sig) { return Validator(p, sig).run(); }

Procedure validate_star(const Procedure& p, bool sigma_only_io) {
  for (const auto* v : {&p.in, &p.out})
    for (const auto& d : *v) {
      if (d.sort.starred())
        throw ParseError({Kind::WellFormed, {}, "star-restriction", "'" + d.name + "' has starred sort " + d.sort.name()});
      if (sigma_only_io && d.sort.is_nat())
        throw ParseError({Kind::WellFormed, {}, "star-restriction", "'" + d.name + "' has sort nat"});
    }
  Procedure out = p;
  out.star_restricted = true;
  return out;
}

}  // namespace whilecc

#include "whilecc/interp.hpp"
#include "whilecc/lang.hpp"

namespace whilecc {

namespace {

StmtPtr seq_all(const std::vector<StmtPtr>& pre, StmtPtr tail) {
  for (std::size_t i = pre.size(); i-- > 0;) tail = tail ? Stmt::seq(pre[i], tail) : pre[i];
  return tail;
}

class Eliminator {
 public:
  Eliminator(const Procedure& p, const Signature& sig) : p_(p), sig_(sig) {}

  Procedure run() {
    p_.body = stmt(p_.body);
    return auto_init(p_, sig_);
  }

 private:
  TermPtr fresh(const std::string& base, Sort s) {
    std::string name;
    do {
      name = "_" + base + std::to_string(++count_);
    } while (p_.slot_of(name) >= 0);
    p_.aux.push_back({name, s});
    return Term::var(name, p_.slot_of(name), s);
  }

  // Moves every choose of t into statements appended to `pre`; the returned
  // term is choose-free and has t's value after `pre` has run.
  TermPtr lift(const TermPtr& t, std::vector<StmtPtr>& pre) {
    if (!contains_choose(*t)) return t;
    if (t->kind == Term::Kind::Choose) {
      TermPtr w = fresh("w", Sort::nat());
      TermPtr found = fresh("found", Sort::boolean());
      TermPtr body = substitute(t->args[0], t->name, w);
      std::vector<StmtPtr> test;
      TermPtr b = lift(body, test);
      test.push_back(Stmt::assign({found->name}, {found->slot}, {b}, t->loc));
      StmtPtr step = Stmt::assign({w->name}, {w->slot}, {Term::app(sig_.at("S"), {w}, t->loc)}, t->loc);
      pre.push_back(Stmt::assign({w->name}, {w->slot}, {Term::lit(Sort::nat(), 0, t->loc)}, t->loc));
      pre.push_back(seq_all(test, nullptr));
      pre.push_back(Stmt::while_(Term::app(sig_.at("not"), {found}, t->loc), seq_all({step}, seq_all(test, nullptr)),
                                 t->loc));
      return w;
    }
    if (t->symbol.conditional) {
      TermPtr c = lift(t->args[0], pre);
      TermPtr g = fresh("g", Sort::boolean());
      pre.push_back(Stmt::assign({g->name}, {g->slot}, {c}, t->loc));
      std::vector<StmtPtr> p1, p2;
      TermPtr a = lift(t->args[1], p1);
      TermPtr b = lift(t->args[2], p2);
      pre.push_back(Stmt::if_(g, seq_all(p1, nullptr) ? seq_all(p1, nullptr) : Stmt::skip(t->loc),
                              seq_all(p2, nullptr) ? seq_all(p2, nullptr) : Stmt::skip(t->loc), t->loc));
      return Term::app(t->symbol, {g, a, b}, t->loc);
    }
    std::vector<TermPtr> args;
    for (const auto& a : t->args) args.push_back(lift(a, pre));
    return Term::app(t->symbol, std::move(args), t->loc);
  }

  StmtPtr stmt(const StmtPtr& s) {
    if (!contains_choose(*s)) return s;
    switch (s->kind) {
      case Stmt::Kind::Seq:
        return Stmt::seq(stmt(s->first), stmt(s->second));
      case Stmt::Kind::Assign: {
        std::vector<StmtPtr> pre;
        std::vector<TermPtr> rhs;
        for (const auto& t : s->rhs) rhs.push_back(lift(t, pre));
        return seq_all(pre, Stmt::assign(s->lhs, s->lhs_slots, rhs, s->loc));
      }
      case Stmt::Kind::If: {
        std::vector<StmtPtr> pre;
        TermPtr g = lift(s->guard, pre);
        return seq_all(pre, Stmt::if_(g, stmt(s->first), stmt(s->second), s->loc));
      }
      case Stmt::Kind::While: {
        std::vector<StmtPtr> pre;
        TermPtr g = lift(s->guard, pre);
        StmtPtr body = stmt(s->first);
        StmtPtr loop = Stmt::while_(g, pre.empty() ? body : Stmt::seq(body, seq_all(pre, nullptr)), s->loc);
        return seq_all(pre, loop);
      }
      default:
        return s;
    }
  }

  Procedure p_;
  const Signature& sig_;
  int count_ = 0;
};

}  // namespace

Procedure choose_eliminate(const Procedure& p, const PartialAlgebra& a) {
  if (!a.total()) throw EliminationError("choose elimination needs a total algebra; '" + a.name() + "' is partial");
  Procedure out = Eliminator(p, a.signature()).run();
  auto diags = validate(out, a.signature());
  if (!diags.empty()) throw EliminationError("elimination produced an invalid procedure: " + diags.front().to_string());
  return out;
}

Procedure choose_eliminate(const Procedure& p) { return choose_eliminate(p, *shared_builtin(p.algebra)); }

}  // namespace whilecc

#include <sstream>

#include "whilecc/lang.hpp"

namespace whilecc {

namespace {

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

void print_stmt(std::ostringstream& os, const Stmt& s0, int indent) {
  const Stmt* s = &s0;
  while (s->kind == Stmt::Kind::Seq) {
    print_stmt(os, *s->first, indent);
    os << ";\n";
    s = s->second.get();
  }
  switch (s->kind) {
    case Stmt::Kind::Skip:
      os << pad(indent) << "skip";
      return;
    case Stmt::Kind::Div:
      os << pad(indent) << "div";
      return;
    case Stmt::Kind::Assign: {
      os << pad(indent);
      for (std::size_t i = 0; i < s->lhs.size(); ++i) os << (i ? ", " : "") << s->lhs[i];
      os << " :=";
      for (std::size_t i = 0; i < s->rhs.size(); ++i) os << (i ? ", " : " ") << print(*s->rhs[i]);
      return;
    }
    case Stmt::Kind::If:
      os << pad(indent) << "if " << print(*s->guard) << " then\n";
      print_stmt(os, *s->first, indent + 1);
      if (s->second && s->second->kind != Stmt::Kind::Skip) {
        os << "\n" << pad(indent) << "else\n";
        print_stmt(os, *s->second, indent + 1);
      }
      os << "\n" << pad(indent) << "fi";
      return;
    case Stmt::Kind::While:
      os << pad(indent) << "while " << print(*s->guard) << " do\n";
      print_stmt(os, *s->first, indent + 1);
      os << "\n" << pad(indent) << "od";
      return;
    case Stmt::Kind::Seq:
      return;
  }
}

void print_decls(std::ostringstream& os, const char* kw, const std::vector<VarDecl>& ds) {
  if (ds.empty()) return;
  os << "  " << kw;
  for (std::size_t i = 0; i < ds.size(); ++i) os << (i ? ", " : " ") << ds[i].name << ": " << ds[i].sort.name();
  os << "\n";
}

}  // namespace

std::string print(const Term& t);
std::string print(const Stmt& s, int indent);

namespace {
std::string print_proc(const Procedure& p);
}

std::string print(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
      return t.name;
    case Term::Kind::Lit:
      return to_string(t.literal);
    case Term::Kind::Choose:
      return "(choose " + t.name + " : " + print(t.body()) + ")";
    case Term::Kind::App: {
      if (t.args.empty()) return t.symbol.name;
      std::string s = t.symbol.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? ", " : "") + print(*t.args[i]);
      return s + ")";
    }
  }
  return {};
}

std::string print(const Stmt& s, int indent) {
  std::ostringstream os;
  print_stmt(os, s, indent);
  return os.str();
}

namespace {
std::string print_proc(const Procedure& p) {
  std::ostringstream os;
  os << "func" << (p.star_restricted ? " star" : "") << (p.name.empty() ? "" : " " + p.name) << "\n";
  print_decls(os, "in", p.in);
  print_decls(os, "out", p.out);
  print_decls(os, "aux", p.aux);
  os << "begin\n";
  if (p.body) os << print(*p.body, 1) << "\n";
  os << "end\n";
  return os.str();
}
}  // namespace

std::string print(const Procedure& p) {
  if (p.algebra == "RN*") return print_proc(p);
  return "algebra " + p.algebra + "\n\n" + print_proc(p);
}

std::string print(const Program& p) {
  std::ostringstream os;
  os << "algebra " << p.algebra_name << "\n";
  for (const auto& proc : p.procedures) os << "\n" << print_proc(proc);
  return os.str();
}

}  // namespace whilecc

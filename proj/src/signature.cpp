#include "whilecc/signature.hpp"

#include <algorithm>

namespace whilecc {

Sort Sort::user(std::string name) {
  if (name.empty() || name == "bool" || name == "nat" || name == "real" || name == "interval" ||
      name.find('*') != std::string::npos)
    throw SignatureError("invalid user sort name '" + name + "'");
  return Sort(Kind::User, std::move(name));
}

Sort Sort::parse(const std::string& text) {
  bool star = !text.empty() && text.back() == '*';
  std::string base = star ? text.substr(0, text.size() - 1) : text;
  Sort s = base == "bool"       ? boolean()
           : base == "nat"      ? nat()
           : base == "real"     ? real()
           : base == "interval" ? interval()
                                : user(base);
  return star ? s.star() : s;
}

Sort Sort::star() const {
  if (starred_) throw SignatureError("sort " + name() + " is already starred");
  Sort s = *this;
  s.starred_ = true;
  return s;
}

Sort Sort::element() const {
  if (!starred_) throw SignatureError("sort " + name() + " is not an array sort");
  Sort s = *this;
  s.starred_ = false;
  return s;
}

std::string ClosedTerm::to_string() const {
  if (args.empty()) return symbol;
  std::string out = symbol + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i].to_string();
  return out + ")";
}

namespace sym {
std::string if_(const Sort& s) { return "if_" + s.tag(); }
std::string eq(const Sort& s) { return "eq_" + s.tag(); }
std::string less(const Sort& s) { return "less_" + s.tag(); }
std::string null(const Sort& e) { return "Null_" + e.tag(); }
std::string lgth(const Sort& e) { return "Lgth_" + e.tag(); }
std::string ap(const Sort& e) { return "Ap_" + e.tag(); }
std::string update(const Sort& e) { return "Update_" + e.tag(); }
std::string newlength(const Sort& e) { return "Newlength_" + e.tag(); }
}  // namespace sym

void Signature::add_sort(const Sort& s, ClosedTerm default_term) {
  if (has_sort(s)) throw SignatureError("duplicate sort " + s.name());
  sorts_.push_back(s);
  defaults_.emplace(s, std::move(default_term));
}

void Signature::add_symbol(FuncSymbol f) {
  if (f.name.empty()) throw SignatureError("empty symbol name");
  if (symbols_.count(f.name)) throw SignatureError("duplicate symbol " + f.name);
  if (f.family.empty()) f.family = f.name;
  std::string name = f.name;
  symbols_.emplace(name, std::move(f));
}

void Signature::mark_partial(const std::string& name) {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) throw SignatureError("unknown symbol " + name);
  it->second.partial = true;
}

bool Signature::has_sort(const Sort& s) const { return std::find(sorts_.begin(), sorts_.end(), s) != sorts_.end(); }

const FuncSymbol* Signature::find(const std::string& name) const {
  auto it = symbols_.find(name);
  return it == symbols_.end() ? nullptr : &it->second;
}

const FuncSymbol& Signature::at(const std::string& name) const {
  const FuncSymbol* f = find(name);
  if (!f) throw SignatureError("unknown symbol " + name);
  return *f;
}

std::vector<const FuncSymbol*> Signature::family(const std::string& fam) const {
  std::vector<const FuncSymbol*> out;
  for (const auto& [name, f] : symbols_)
    if (f.family == fam) out.push_back(&f);
  return out;
}

const ClosedTerm& Signature::default_term(const Sort& s) const {
  auto it = defaults_.find(s);
  if (it == defaults_.end()) throw SignatureError("unknown sort " + s.name());
  return it->second;
}

Sort Signature::sort_of(const ClosedTerm& t) const {
  const FuncSymbol& f = at(t.symbol);
  if (f.args.size() != t.args.size()) throw SignatureError("arity mismatch in closed term " + t.to_string());
  for (std::size_t i = 0; i < t.args.size(); ++i)
    if (sort_of(t.args[i]) != f.args[i]) throw SignatureError("sort mismatch in closed term " + t.to_string());
  return f.result;
}

std::vector<std::string> Signature::validate() const {
  std::vector<std::string> problems;
  auto need = [&](const std::string& name) {
    if (!find(name)) problems.push_back("missing symbol " + name);
  };
  for (const auto& [name, f] : symbols_) {
    for (const auto& a : f.args)
      if (!has_sort(a)) problems.push_back("symbol " + name + " uses unknown sort " + a.name());
    if (!has_sort(f.result)) problems.push_back("symbol " + name + " has unknown result sort " + f.result.name());
  }
  for (const auto& s : sorts_) {
    try {
      if (sort_of(default_term(s)) != s) problems.push_back("default term of " + s.name() + " has the wrong sort");
    } catch (const SignatureError& e) {
      problems.push_back("default term of " + s.name() + ": " + e.what());
    }
  }
  if (standard_) {
    if (!has_sort(Sort::boolean())) problems.push_back("standard signature without bool");
    for (const char* b : {"true", "false", "and", "or", "not"}) need(b);
    for (const auto& s : sorts_)
      if (!s.is_bool()) need(sym::if_(s));
  }
  if (n_standard_) {
    if (!has_sort(Sort::nat())) problems.push_back("N-standard signature without nat");
    for (const char* n : {"zero_nat", "S", "eq_nat", "less_nat", "if_nat"}) need(n);
  }
  for (const auto& s : equality_) need(sym::eq(s));
  for (const auto& s : order_) need(sym::less(s));
  return problems;
}

namespace {

bool reserved_boolean(const std::string& name) {
  static const std::set<std::string> fixed = {"true", "false", "and", "or", "not"};
  return fixed.count(name) || name.rfind("if_", 0) == 0 || name.rfind("eq_", 0) == 0 || name.rfind("less_", 0) == 0;
}

void add_conditional(Signature& sig, const Sort& s) {
  sig.add_symbol({sym::if_(s), "if", {Sort::boolean(), s, s}, s, false, true});
}

}  // namespace

Signature standardise(const Signature& in) {
  if (in.standard_) throw SignatureError("signature is already standard");
  for (const auto& [name, f] : in.symbols_)
    if (reserved_boolean(name)) throw SignatureError("symbol " + name + " collides with a reserved boolean name");
  if (in.has_sort(Sort::boolean())) throw SignatureError("bool sort already present");

  Signature out;
  const Sort b = Sort::boolean();
  out.add_sort(b, {"false", {}});
  for (const auto& s : in.sorts_) out.add_sort(s, in.default_term(s));
  for (const auto& [name, f] : in.symbols_) out.add_symbol(f);
  out.add_symbol({"true", "true", {}, b});
  out.add_symbol({"false", "false", {}, b});
  out.add_symbol({"and", "and", {b, b}, b});
  out.add_symbol({"or", "or", {b, b}, b});
  out.add_symbol({"not", "not", {b}, b});
  for (const auto& s : in.sorts_) add_conditional(out, s);
  for (const auto& s : in.equality_) {
    out.declare_equality(s);
    out.add_symbol({sym::eq(s), "eq", {s, s}, b});
  }
  for (const auto& s : in.order_) {
    out.declare_order(s);
    out.add_symbol({sym::less(s), "less", {s, s}, b});
  }
  out.standard_ = true;
  return out;
}

Signature n_standardise(const Signature& in) {
  if (!in.standard_) throw SignatureError("n_standardise needs a standard signature");
  if (in.n_standard_) throw SignatureError("signature is already N-standard");
  for (const char* n : {"zero_nat", "S", "eq_nat", "less_nat", "if_nat"})
    if (in.find(n)) throw SignatureError(std::string("symbol ") + n + " collides with a reserved nat name");
  if (in.has_sort(Sort::nat())) throw SignatureError("nat sort already present");

  Signature out = in;
  const Sort n = Sort::nat();
  out.add_sort(n, {"zero_nat", {}});
  out.add_symbol({"zero_nat", "zero", {}, n});
  out.add_symbol({"S", "S", {n}, n});
  out.add_symbol({"eq_nat", "eq", {n, n}, Sort::boolean()});
  out.add_symbol({"less_nat", "less", {n, n}, Sort::boolean()});
  add_conditional(out, n);
  out.declare_equality(n);
  out.declare_order(n);
  out.n_standard_ = true;
  return out;
}

Signature star_signature(const Signature& in) {
  if (!in.n_standard_) throw SignatureError("star_signature needs an N-standard signature");
  if (in.starred_) throw SignatureError("signature is already starred");
  Signature out = in;
  const Sort n = Sort::nat();
  for (const auto& s : in.sorts_) {
    const Sort a = s.star();
    out.add_sort(a, {sym::null(s), {}});
    out.add_symbol({sym::null(s), "Null", {}, a});
    out.add_symbol({sym::lgth(s), "Lgth", {a}, n});
    out.add_symbol({sym::ap(s), "Ap", {a, n}, s});
    out.add_symbol({sym::update(s), "Update", {a, n, s}, a});
    out.add_symbol({sym::newlength(s), "Newlength", {a, n}, a});
    add_conditional(out, a);
  }
  out.starred_ = true;
  return out;
}

ClosedTerm default_term(const Signature& sig, const Sort& s) { return sig.default_term(s); }

}  // namespace whilecc

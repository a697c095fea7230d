#include "whilecc/ecode.hpp"

#include <sstream>
#include <unordered_map>

namespace whilecc {

namespace {

// Exact results up to this size stay exact; larger ones are rounded.
constexpr std::size_t kFoldBits = 512;
constexpr long kMaxExtraPrecision = 1L << 16;

void settle(ECode::Ball& b, long p) {
  if (b.radius == 0 && bit_size(b.center) <= kFoldBits) return;
  Rational c = round_to_grid(b.center, p);
  Rational err = abs(Rational(c - b.center));
  b.radius = ceil_to_grid(b.radius + err, p);
  b.center = std::move(c);
}

}  // namespace

ECode::ECode(Private, Kind kind, std::vector<ECodePtr> kids) : kind_(kind), kids_(std::move(kids)) {}

ECode::~ECode() {
  // Long chains would otherwise recurse once per node on destruction.
  std::vector<ECodePtr> pending = std::move(kids_);
  while (!pending.empty()) {
    ECodePtr node = std::move(pending.back());
    pending.pop_back();
    if (node.use_count() == 1) {
      auto& kids = const_cast<ECode&>(*node).kids_;
      for (auto& k : kids) pending.push_back(std::move(k));
      kids.clear();
    }
  }
}

ECodePtr ECode::constant(const Rational& q) {
  auto e = std::make_shared<ECode>(Private{}, Kind::Constant, std::vector<ECodePtr>{});
  Rational c = q;
  c.canonicalize();
  e->exact_ = c;
  e->label_ = "const:" + to_string(c);
  return e;
}

ECodePtr ECode::constant_indexed(const Rational& q, Natural k) {
  auto e = std::make_shared<ECode>(Private{}, Kind::Constant, std::vector<ECodePtr>{});
  Rational c = q;
  c.canonicalize();
  e->exact_ = c;
  e->const_index_ = std::move(k);
  e->label_ = "const:" + to_string(c);
  return e;
}

Natural ECode::index(unsigned n) const {
  if (const_index_) return *const_index_;
  return rat_index(at(n));
}

ECodePtr ECode::sequence(std::string label, Rule rule) {
  auto e = std::make_shared<ECode>(Private{}, Kind::Sequence, std::vector<ECodePtr>{});
  e->label_ = std::move(label);
  e->rule_ = std::move(rule);
  return e;
}

ECodePtr ECode::sum(ECodePtr a, ECodePtr b) {
  if (a->exact_ && b->exact_) {
    Rational s = *a->exact_ + *b->exact_;
    if (bit_size(s) <= kFoldBits) return constant(s);
  }
  if (a->exact_ && *a->exact_ == 0) return b;
  if (b->exact_ && *b->exact_ == 0) return a;
  return std::make_shared<ECode>(Private{}, Kind::Sum, std::vector<ECodePtr>{std::move(a), std::move(b)});
}

ECodePtr ECode::negate(ECodePtr a) {
  if (a->exact_) return constant(-*a->exact_);
  return std::make_shared<ECode>(Private{}, Kind::Negate, std::vector<ECodePtr>{std::move(a)});
}

ECodePtr ECode::product(ECodePtr a, ECodePtr b) {
  if (a->exact_ && b->exact_) {
    Rational s = *a->exact_ * *b->exact_;
    if (bit_size(s) <= kFoldBits) return constant(s);
  }
  if ((a->exact_ && *a->exact_ == 0) || (b->exact_ && *b->exact_ == 0)) return constant(0);
  if (a->exact_ && *a->exact_ == 1) return b;
  if (b->exact_ && *b->exact_ == 1) return a;
  return std::make_shared<ECode>(Private{}, Kind::Product, std::vector<ECodePtr>{std::move(a), std::move(b)});
}

ECodePtr ECode::reciprocal(ECodePtr a) {
  if (a->exact_) {
    if (*a->exact_ == 0) throw std::invalid_argument("reciprocal of exact zero");
    Rational r = 1 / *a->exact_;
    if (bit_size(r) <= kFoldBits) return constant(r);
  }
  return std::make_shared<ECode>(Private{}, Kind::Reciprocal, std::vector<ECodePtr>{std::move(a)});
}

ECodePtr ECode::absolute(ECodePtr a) {
  if (a->exact_) return constant(abs(*a->exact_));
  return std::make_shared<ECode>(Private{}, Kind::Abs, std::vector<ECodePtr>{std::move(a)});
}

Rational ECode::term(unsigned n) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
  }
  Rational v = rule_(n);
  v.canonicalize();
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(n, v);
  return v;
}

std::optional<ECode::Ball> ECode::enclose(long p) const {
  std::unordered_map<const ECode*, Ball> done;
  std::vector<std::pair<const ECode*, bool>> stack{{this, false}};
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    if (done.count(node)) {
      stack.pop_back();
      continue;
    }
    if (!expanded && !node->kids_.empty()) {
      stack.back().second = true;
      for (const auto& k : node->kids_)
        if (!done.count(k.get())) stack.emplace_back(k.get(), false);
      continue;
    }
    stack.pop_back();
    Ball b;
    switch (node->kind_) {
      case Kind::Constant:
        b = {*node->exact_, 0};
        break;
      case Kind::Sequence:
        b = {node->term(static_cast<unsigned>(p)), pow2(-p)};
        break;
      case Kind::Sum: {
        const Ball& x = done.at(node->kids_[0].get());
        const Ball& y = done.at(node->kids_[1].get());
        b = {x.center + y.center, x.radius + y.radius};
        break;
      }
      case Kind::Negate: {
        const Ball& x = done.at(node->kids_[0].get());
        b = {-x.center, x.radius};
        break;
      }
      case Kind::Product: {
        const Ball& x = done.at(node->kids_[0].get());
        const Ball& y = done.at(node->kids_[1].get());
        b.center = x.center * y.center;
        b.radius = abs(x.center) * y.radius + abs(y.center) * x.radius + x.radius * y.radius;
        break;
      }
      case Kind::Abs: {
        const Ball& x = done.at(node->kids_[0].get());
        b = {abs(x.center), x.radius};
        break;
      }
      case Kind::Reciprocal: {
        const Ball& x = done.at(node->kids_[0].get());
        Rational m = abs(x.center);
        if (m <= x.radius) return std::nullopt;
        b.center = 1 / x.center;
        b.radius = x.radius == 0 ? Rational(0) : Rational(x.radius / (m * (m - x.radius)));
        break;
      }
    }
    settle(b, p);
    done.emplace(node, std::move(b));
  }
  return done.at(this);
}

Rational ECode::at(unsigned n) const {
  if (exact_) return *exact_;
  if (kind_ == Kind::Sequence) return term(n);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
  }
  const long target = static_cast<long>(n) + 2;
  Rational result;
  for (long extra = 8;; extra *= 2) {
    if (extra > kMaxExtraPrecision) throw ProducerFailure("e-code enclosure did not tighten at n=" + std::to_string(n));
    auto b = enclose(static_cast<long>(n) + extra);
    if (!b || b->radius > pow2(-target)) continue;
    result = b->radius == 0 ? b->center : round_to_grid(b->center, target + 1);
    break;
  }
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(n, result);
  return result;
}

std::string ECode::describe() const {
  if (!label_.empty()) return label_;
  std::ostringstream os;
  switch (kind_) {
    case Kind::Sum: os << "(" << kids_[0]->describe() << " + " << kids_[1]->describe() << ")"; break;
    case Kind::Negate: os << "-(" << kids_[0]->describe() << ")"; break;
    case Kind::Product: os << "(" << kids_[0]->describe() << " * " << kids_[1]->describe() << ")"; break;
    case Kind::Abs: os << "abs(" << kids_[0]->describe() << ")"; break;
    case Kind::Reciprocal: os << "inv(" << kids_[0]->describe() << ")"; break;
    default: os << "?"; break;
  }
  return os.str();
}

PrefixReport validate_prefix(const ECode& e, unsigned n_limit, unsigned k_limit) {
  PrefixReport rep;
  if (e.exact()) return rep;  // constant sequence
  std::vector<Rational> terms;
  try {
    for (unsigned i = 0; i <= k_limit; ++i) terms.push_back(e.at(i));
  } catch (const ProducerFailure& err) {
    rep.ok = false;
    rep.detail = err.what();
    return rep;
  }
  for (unsigned n = 0; n < n_limit && n <= k_limit; ++n) {
    for (unsigned k = n + 1; k <= k_limit; ++k) {
      if (abs(Rational(terms[k] - terms[n])) >= pow2(-static_cast<long>(n))) {
        rep.ok = false;
        rep.bad_n = n;
        rep.bad_k = k;
        rep.detail = "|e(" + std::to_string(k) + ") - e(" + std::to_string(n) + ")| >= 2^-" + std::to_string(n);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace whilecc

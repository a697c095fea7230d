#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>

namespace whilecc {

// Work budget shared by one evaluation. Every refinement step, tree step and
// dovetail probe costs one unit.
class Fuel {
 public:
  explicit Fuel(std::uint64_t steps) : remaining_(steps) {}

  bool consume(std::uint64_t n = 1) {
    if (remaining_ < n) {
      used_ += remaining_;
      remaining_ = 0;
      return false;
    }
    remaining_ -= n;
    used_ += n;
    return true;
  }
  bool exhausted() const { return remaining_ == 0; }
  std::uint64_t remaining() const { return remaining_; }
  std::uint64_t used() const { return used_; }

  // Budget for a sub-computation; charge it back with settle().
  Fuel slice(std::uint64_t cap) const { return Fuel(remaining_ < cap ? remaining_ : cap); }
  void settle(const Fuel& child) { consume(child.used()); }

 private:
  std::uint64_t remaining_;
  std::uint64_t used_ = 0;
};

struct ProvenDivergent {
  bool operator==(const ProvenDivergent&) const = default;
};
struct FuelExhausted {
  bool operator==(const FuelExhausted&) const = default;
};

template <class T>
class Verdict {
 public:
  Verdict(T v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Verdict(ProvenDivergent d) : v_(d) {}  // NOLINT
  Verdict(FuelExhausted f) : v_(f) {}  // NOLINT

  bool converged() const { return std::holds_alternative<T>(v_); }
  bool proven_divergent() const { return std::holds_alternative<ProvenDivergent>(v_); }
  bool fuel_exhausted() const { return std::holds_alternative<FuelExhausted>(v_); }

  const T& value() const {
    if (!converged()) throw std::logic_error("Verdict has no value");
    return std::get<T>(v_);
  }
  T& value() {
    if (!converged()) throw std::logic_error("Verdict has no value");
    return std::get<T>(v_);
  }

  // Same divergence kind, different value type.
  template <class U>
  Verdict<U> divergence() const {
    if (proven_divergent()) return ProvenDivergent{};
    return FuelExhausted{};
  }

  const char* kind_name() const {
    return converged() ? "converged" : proven_divergent() ? "proven-divergent" : "fuel-exhausted";
  }

 private:
  std::variant<T, ProvenDivergent, FuelExhausted> v_;
};

}  // namespace whilecc

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tropa {

// Exact rational weight. All comparisons along the separation chain are exact
// order claims, so no floating point anywhere.
using Weight = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Accepts integers ("-2"), decimals ("0.25"), and fractions ("3/4").
// Decimals are converted exactly.
Weight parse_weight(std::string_view text);

// Canonical rendering: plain integer when the denominator is 1, "p/q" otherwise.
std::string weight_str(const Weight& w);

/// Value of a tropical automaton on a term: a weight, or bot when no
/// accepting run exists. Bot is never ordered against weights; callers
/// branch on is_bot() first.
class SemValue {
 public:
  SemValue() = default;  // bot
  SemValue(Weight w) : w_(std::move(w)) {}

  static SemValue bot() { return SemValue(); }

  bool is_bot() const { return !w_.has_value(); }
  const Weight& value() const {
    if (!w_) throw std::logic_error("SemValue: value() on bot");
    return *w_;
  }

  std::string str() const { return w_ ? weight_str(*w_) : "bot"; }

  friend bool operator==(const SemValue&, const SemValue&) = default;

 private:
  std::optional<Weight> w_;
};

}  // namespace tropa

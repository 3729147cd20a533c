#include "tropa/weight.hpp"

#include <cctype>

namespace tropa {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Weight parse_weight(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty weight");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  auto bad = [&] { throw std::invalid_argument("malformed weight: '" + std::string(text) + "'"); };

  Weight result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad();
    BigInt d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator in weight: '" + std::string(text) + "'");
    result = Weight(BigInt(std::string(num)), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (!all_digits(ip) || !all_digits(fp)) bad();
    BigInt scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    result = Weight(BigInt(std::string(ip)) * scale + BigInt(std::string(fp)), scale);
  } else {
    if (!all_digits(s)) bad();
    result = Weight(BigInt(std::string(s)));
  }
  return negative ? Weight(-result) : result;
}

std::string weight_str(const Weight& w) {
  std::string num = numerator(w).str();
  if (denominator(w) == 1) return num;
  return num + "/" + denominator(w).str();
}

}  // namespace tropa

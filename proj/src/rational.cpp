#include "stepverify/rational.hpp"

namespace stepverify {

std::string format_rational(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '-' || text[i] == '+') {
    negative = text[i] == '-';
    ++i;
  }
  std::string whole, frac;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') whole.push_back(text[i++]);
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') frac.push_back(text[i++]);
  }
  if (i != text.size() || (whole.empty() && frac.empty())) return std::nullopt;
  BigInt scale = 1;
  for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
  BigInt numerator = (whole.empty() ? BigInt(0) : BigInt(whole)) * scale +
                     (frac.empty() ? BigInt(0) : BigInt(frac));
  Rational value(numerator, scale);
  return negative ? Rational(-value) : value;
}

std::optional<Rational> parse_rational_string(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  auto num = parse_decimal(text.substr(0, slash));
  auto den = parse_decimal(text.substr(slash + 1));
  if (!num || !den || !is_integer(*num) || !is_integer(*den) || *den == 0) return std::nullopt;
  return *num / *den;
}

}  // namespace stepverify

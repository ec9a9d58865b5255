#include "distcert/rational.hpp"

#include <cctype>

namespace distcert {

namespace {

bool parse_integer(std::string_view s, Integer& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = (s[0] == '-');
    i = 1;
  }
  if (i == s.size()) return false;
  Integer v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? -v : v;
  return true;
}

} // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  // strip surrounding whitespace
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num, den;
    if (!parse_integer(text.substr(0, slash), num)) return std::nullopt;
    if (!parse_integer(text.substr(slash + 1), den)) return std::nullopt;
    if (den == 0) return std::nullopt;
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (frac_part.empty()) return std::nullopt;
    bool neg = !int_part.empty() && int_part[0] == '-';
    Integer ip = 0;
    if (!int_part.empty() && int_part != "-" && int_part != "+") {
      if (!parse_integer(int_part, ip)) return std::nullopt;
    }
    Integer fp = 0, scale = 1;
    for (char c : frac_part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      fp = fp * 10 + (c - '0');
      scale *= 10;
    }
    Rational mag = Rational(abs(ip)) + Rational(fp, scale);
    return neg ? -mag : mag;
  }
  Integer v;
  if (!parse_integer(text, v)) return std::nullopt;
  return Rational(v);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

} // namespace distcert

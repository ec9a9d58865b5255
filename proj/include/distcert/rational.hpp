#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace distcert {

using Integer = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational. Always normalized: denominator > 0,
/// gcd(|num|, den) = 1.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a decimal literal ("0.249" -> 249/1000).
/// Conversion is exact; returns nullopt on malformed input.
std::optional<Rational> parse_rational(std::string_view text);

/// Renders as "p" or "p/q" (never decimal; exact round-trip).
std::string to_string(const Rational& r);

} // namespace distcert

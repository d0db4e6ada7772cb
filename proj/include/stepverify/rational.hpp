#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace stepverify {

// All numeric comparison in the verifier happens on exact rationals so the
// epsilon tests are platform independent. Decimal literals become exact
// decimal fractions ("3.5" -> 7/2), never doubles.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Canonical text form: "42" when integral, "n/d" otherwise. Stable across
// platforms, used for report serialization.
std::string format_rational(const Rational& r);

// Inverse of format_rational; additionally accepts plain decimals ("0.8").
std::optional<Rational> parse_rational_string(std::string_view text);

// Exact decimal parse: optional sign, digits, optional fraction digits.
// Returns nullopt on anything else (no exponents, no separators).
std::optional<Rational> parse_decimal(std::string_view text);

}  // namespace stepverify

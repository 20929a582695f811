#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace boost {

// Boost 1.74's mixed-type operator== recurses forever under C++20 rewritten comparisons;
// an exact non-template overload wins overload resolution and breaks the loop.
inline constexpr bool operator==(const rational<std::int64_t>& a, int b) { return a == rational<std::int64_t>(b); }

}  // namespace boost

namespace reservations {

/// Exact rational number used for fair shares, flows and biases.
using Rational = boost::rational<std::int64_t>;

std::int64_t floor_of(const Rational& x);
std::int64_t ceil_of(const Rational& x);

inline bool is_integral(const Rational& x) { return x.denominator() == 1; }

/// Fractional part in [0, 1).
inline Rational fractional_part(const Rational& x) { return x - Rational(floor_of(x)); }

inline double to_double(const Rational& x) { return boost::rational_cast<double>(x); }

/// "7" for integers, "7/3" otherwise.
std::string to_string(const Rational& x);

/// Accepts "3", "-3", "3/20" and finite decimals such as "0.15" (converted exactly).
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

}  // namespace reservations

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace cpi {

/// Exact arbitrary-precision rational. All probabilities in the library use it.
using Rational = mpq_class;

/// Parses `3`, `0.35`, `.5`, `-2/7`, `1e-6`, `2.5E3`. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical `num/den` form, or just `num` when the denominator is 1.
std::string to_fraction_string(const Rational& value);

/// Decimal rendering rounded half-to-even at `places` digits, trailing zeros stripped.
std::string to_decimal_string(const Rational& value, int places = 6);

/// Rounds half-to-even to a multiple of 1/10^places.
Rational round_half_even(const Rational& value, int places);

double to_double(const Rational& value);

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace cpi

#include "cpi/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace cpi {

namespace {

mpz_class pow10(long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
  return result;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string original(text);
  auto fail = [&]() -> Rational { throw std::invalid_argument("not a number: '" + original + "'"); };
  if (text.empty()) return fail();

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) return fail();
    result = Rational(mpz_class(std::string(num), 10), d);
    result.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) return fail();
      exponent = std::stol(std::string(exp_text));
      if (exp_negative) exponent = -exponent;
      text = text.substr(0, e);
    }
    std::string_view int_part = text;
    std::string_view frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      int_part = text.substr(0, dot);
      frac_part = text.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) return fail();
    if (!int_part.empty() && !all_digits(int_part)) return fail();
    if (!frac_part.empty() && !all_digits(frac_part)) return fail();
    std::string digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
    mpz_class mantissa(digits.empty() ? std::string("0") : digits, 10);
    if (exponent >= 0) {
      result = Rational(mantissa * pow10(exponent));
    } else {
      result = Rational(mantissa, pow10(-exponent));
      result.canonicalize();
    }
  }
  if (negative) result = -result;
  return result;
}

std::string to_fraction_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational round_half_even(const Rational& value, int places) {
  const mpz_class scale = pow10(places);
  const Rational scaled = value * scale;
  mpz_class floor_value;
  mpz_fdiv_q(floor_value.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  const Rational fraction = scaled - Rational(floor_value);
  const Rational half(1, 2);
  mpz_class rounded = floor_value;
  if (fraction > half || (fraction == half && mpz_odd_p(floor_value.get_mpz_t()))) rounded += 1;
  Rational result(rounded, scale);
  result.canonicalize();
  return result;
}

std::string to_decimal_string(const Rational& value, int places) {
  const Rational rounded = round_half_even(value, places);
  const mpz_class scale = pow10(places);
  mpz_class scaled = rounded.get_num() * (scale / rounded.get_den());
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (static_cast<int>(digits.size()) <= places) digits.insert(0, places + 1 - digits.size(), '0');
  std::string int_part = digits.substr(0, digits.size() - places);
  std::string frac_part = digits.substr(digits.size() - places);
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  std::string out = (negative ? "-" : "") + int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  return out;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace cpi

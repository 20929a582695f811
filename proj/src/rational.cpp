#include "reservations/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace reservations {

std::int64_t floor_of(const Rational& x) {
  const auto n = x.numerator();
  const auto d = x.denominator();  // always positive after normalization
  auto q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

std::int64_t ceil_of(const Rational& x) {
  const auto n = x.numerator();
  const auto d = x.denominator();
  auto q = n / d;
  if (n % d != 0 && n > 0) ++q;
  return q;
}

std::string to_string(const Rational& x) {
  if (x.denominator() == 1) return std::to_string(x.numerator());
  return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

namespace {

std::int64_t parse_integer(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view raw) {
  const auto text = trim(raw);
  if (text.empty()) throw std::invalid_argument("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_integer(trim(text.substr(0, slash)), raw);
    const auto den = parse_integer(trim(text.substr(slash + 1)), raw);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(raw) + "'");
    return Rational(num, den);
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto int_part = text.substr(0, dot);
    auto frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part.front() == '-';
    if (negative || (!int_part.empty() && int_part.front() == '+')) int_part.remove_prefix(1);
    if (frac_part.empty() && int_part.empty()) throw std::invalid_argument("not a rational number: '" + std::string(raw) + "'");
    if (frac_part.size() > 17) throw std::invalid_argument("too many decimal places: '" + std::string(raw) + "'");
    for (char c : frac_part) {
      if (c < '0' || c > '9') throw std::invalid_argument("not a rational number: '" + std::string(raw) + "'");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
    const std::int64_t whole = int_part.empty() ? 0 : parse_integer(int_part, raw);
    const std::int64_t fraction = frac_part.empty() ? 0 : parse_integer(frac_part, raw);
    Rational value(whole * scale + fraction, scale);
    return negative ? -value : value;
  }

  return Rational(parse_integer(text, raw));
}

}  // namespace reservations

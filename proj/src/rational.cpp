#include "yardcrp/rational.hpp"

#include <charconv>

namespace yardcrp {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last)
    throw std::invalid_argument("not a rational number: '" + std::string(whole) + "'");
  return value;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return {parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text)};
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 12) throw std::invalid_argument("too many decimals in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const auto int_part = text.substr(0, dot);
    const bool negative = !int_part.empty() && int_part.front() == '-';
    const std::int64_t whole = int_part.empty() || int_part == "-" || int_part == "+" ? 0 : parse_int(int_part, text);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac, text);
    if (f < 0) throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
    const std::int64_t magnitude = (whole < 0 ? -whole : whole) * scale + f;
    return {negative ? -magnitude : magnitude, scale};
  }
  return {parse_int(text, text), 1};
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace yardcrp

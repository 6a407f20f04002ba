#include "betaexp/real.hpp"

#include "betaexp/errors.hpp"

#include <cctype>
#include <ios>

namespace betaexp {

namespace {

// [sign] digits [. digits] [e [sign] digits], at least one mantissa digit.
bool is_decimal_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t mantissa_digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa_digits;
  }
  if (mantissa_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

}  // namespace

Real parse_real(std::string_view text) {
  if (!is_decimal_literal(text)) {
    throw BetaError(ErrorKind::InvalidArgument,
                    "not a decimal number: '" + std::string(text) + "'");
  }
  return Real(std::string(text));
}

std::string format_real(const Real& value) {
  return value.str(std::numeric_limits<Real>::max_digits10, std::ios_base::scientific);
}

std::string format_fixed(const Real& value, int decimals) {
  return value.str(decimals, std::ios_base::fixed);
}

Real pow2(int exponent) { return boost::multiprecision::ldexp(Real(1), exponent); }

}  // namespace betaexp

#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace betaexp {

/// Working scalar: binary floating point with a 128-bit mantissa.
using Real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2, void,
                                         std::int32_t, -16382, 16383>,
    boost::multiprecision::et_off>;

/// Twice the working width; used where a floor is taken close to an integer.
using WideReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2, void,
                                         std::int32_t, -16382, 16383>,
    boost::multiprecision::et_off>;

inline constexpr int kRealMantissaBits = 128;

/// Parses a plain decimal literal ("1.5", "-2e-3"). Throws BetaError(InvalidArgument).
Real parse_real(std::string_view text);

/// Decimal string with enough significant digits to read back to the same Real.
std::string format_real(const Real& value);

/// Fixed-point rendering with `decimals` digits after the point (round-half-even on the
/// exact binary value).
std::string format_fixed(const Real& value, int decimals);

/// 2^exponent, exact.
Real pow2(int exponent);

}  // namespace betaexp

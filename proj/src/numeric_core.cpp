#include "betaexp/numeric_core.hpp"

#include "betaexp/errors.hpp"

#include <cmath>

namespace betaexp {

Real BetaContext::default_tolerance() { return pow2(-64); }

BetaContext::BetaContext(const Real& beta, int precision_bits, const Real& tolerance)
    : beta_(beta), precision_bits_(precision_bits), tolerance_(tolerance) {
  if (!(beta > 1 && beta < 2)) {
    throw BetaError(ErrorKind::InvalidArgument, "beta must lie in (1,2), got " + format_real(beta));
  }
  if (precision_bits < 1 || precision_bits > kRealMantissaBits) {
    throw BetaError(ErrorKind::InvalidArgument,
                    "precision_bits must lie in [1," + std::to_string(kRealMantissaBits) + "], got " +
                        std::to_string(precision_bits));
  }
  if (tolerance < 0) {
    throw BetaError(ErrorKind::InvalidArgument, "tolerance must be nonnegative");
  }
  const Real denom = beta_ * beta_ - 1;
  support_hi_ = 1 / (beta_ - 1);
  core_lo_ = 1 / denom;
  core_hi_ = beta_ / denom;
}

Real apply_map(const BetaContext& ctx, int digit, const Real& x) {
  return digit ? ctx.beta() * x - 1 : ctx.beta() * x;
}

Real apply_word(const BetaContext& ctx, const BinaryWord& word, const Real& x) {
  const Real& beta = ctx.beta();
  Real digits_part = 0;
  for (std::size_t n = 0; n < word.size(); ++n) {
    digits_part = digits_part * beta;
    if (word[n]) digits_part += 1;
  }
  return boost::multiprecision::pow(beta, static_cast<int>(word.size())) * x - digits_part;
}

Real iterate_word(const BetaContext& ctx, const BinaryWord& word, const Real& x) {
  Real y = x;
  for (std::size_t n = 0; n < word.size(); ++n) y = apply_map(ctx, word[n], y);
  return y;
}

std::string to_string(PolynomialFamily family) {
  switch (family) {
    case PolynomialFamily::P1: return "P1";
    case PolynomialFamily::P2: return "P2";
    case PolynomialFamily::P3: return "P3";
    case PolynomialFamily::Lambda: return "Lambda";
  }
  return "?";
}

PolynomialSpec PolynomialSpec::make(PolynomialFamily family, int m) {
  if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "polynomial index m must be >= 1");
  PolynomialSpec spec{family, m, {}};
  auto& c = spec.coefficients;
  switch (family) {
    case PolynomialFamily::P1:
      c[4 * m + 3] += 1;
      c[2 * m + 2] -= 1;
      c[m + 2] -= 1;
      c[m + 1] -= 1;
      c[1] += 1;
      c[0] += 1;
      break;
    case PolynomialFamily::P2:
      c[2 * m + 3] += 1;
      c[2 * m + 2] -= 1;
      c[2] -= 1;
      c[0] += 1;
      break;
    case PolynomialFamily::P3:
      c[2 * m + 3] += 1;
      c[1] -= 1;
      c[0] -= 1;
      break;
    case PolynomialFamily::Lambda:
      c[m + 3] += 1;
      c[m + 2] -= 1;
      c[m + 1] -= 1;
      c[0] += 1;
      break;
  }
  std::erase_if(c, [](const auto& term) { return term.second == 0; });
  return spec;
}

int PolynomialSpec::degree() const { return coefficients.empty() ? 0 : coefficients.rbegin()->first; }

Real PolynomialSpec::evaluate(const Real& x) const {
  Real sum = 0;
  for (const auto& [exponent, coef] : coefficients) sum += coef * boost::multiprecision::pow(x, exponent);
  return sum;
}

Real PolynomialSpec::derivative(const Real& x) const {
  Real sum = 0;
  for (const auto& [exponent, coef] : coefficients) {
    if (exponent > 0) sum += coef * exponent * boost::multiprecision::pow(x, exponent - 1);
  }
  return sum;
}

double PolynomialSpec::evaluate(double x) const {
  double sum = 0;
  for (const auto& [exponent, coef] : coefficients) sum += coef * std::pow(x, exponent);
  return sum;
}

namespace {

std::string superscript(int n) {
  static const char* digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string s;
  for (char c : std::to_string(n)) s += digits[c - '0'];
  return s;
}

std::string render(const std::map<int, int>& coefficients, bool unicode) {
  const std::string minus = unicode ? "−" : "-";
  std::string out;
  bool first = true;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    const auto [exponent, coef] = *it;
    if (coef < 0) {
      out += minus;
    } else if (!first) {
      out += "+";
    }
    const int magnitude = std::abs(coef);
    if (exponent == 0) {
      out += std::to_string(magnitude);
    } else {
      if (magnitude != 1) out += std::to_string(magnitude);
      out += "x";
      if (exponent > 1) out += unicode ? superscript(exponent) : "^" + std::to_string(exponent);
    }
    first = false;
  }
  return out.empty() ? "0" : out;
}

int sign_of(const Real& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

std::string PolynomialSpec::to_ascii() const { return render(coefficients, false); }
std::string PolynomialSpec::to_unicode() const { return render(coefficients, true); }

Real smallest_root_above_one(const PolynomialSpec& spec, const RootOptions& options) {
  if (!(options.abs_tol > 0) || !(options.scan_step > 0)) {
    throw BetaError(ErrorKind::InvalidArgument, "root tolerance and scan step must be positive");
  }
  const Real start = Real(1) + Real(options.scan_offset);
  const Real step(options.scan_step);
  Real prev_x = start;
  int prev_sign = sign_of(spec.evaluate(prev_x));
  if (prev_sign == 0) return prev_x;

  for (long i = 1;; ++i) {
    Real x = start + step * i;
    const bool last = x >= 2;
    if (last) x = 2;
    const int s = sign_of(spec.evaluate(x));
    if (s == 0) return x;
    if (s != prev_sign) {
      Real lo = prev_x, hi = x;
      const Real tol(options.abs_tol);
      while (hi - lo > tol) {
        const Real mid = (lo + hi) / 2;
        const int sm = sign_of(spec.evaluate(mid));
        if (sm == 0) return mid;
        if (sm == prev_sign) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return (lo + hi) / 2;
    }
    if (last) break;
    prev_x = x;
    prev_sign = s;
  }
  throw BetaError(ErrorKind::NoRootFound, "no sign change of " + spec.to_ascii() + " in (1,2)");
}

Real smallest_root_above_one(const PolynomialSpec& spec, double abs_tol) {
  RootOptions options;
  options.abs_tol = abs_tol;
  return smallest_root_above_one(spec, options);
}

OmegaDetail omega_detail(int m, double abs_tol) {
  static constexpr PolynomialFamily families[] = {PolynomialFamily::P1, PolynomialFamily::P2,
                                                  PolynomialFamily::P3};
  OmegaDetail detail;
  for (int i = 0; i < 3; ++i) {
    detail.family_roots[i] = smallest_root_above_one(PolynomialSpec::make(families[i], m), abs_tol);
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (detail.family_roots[i] < detail.family_roots[best]) best = i;
  detail.attained_by = families[best];
  detail.value = detail.family_roots[best];
  return detail;
}

Real omega(int m, double abs_tol) { return omega_detail(m, abs_tol).value; }

Real lambda(int m, double abs_tol) {
  return smallest_root_above_one(PolynomialSpec::make(PolynomialFamily::Lambda, m), abs_tol);
}

ThresholdTable::ThresholdTable(int m_max, double abs_tol) {
  if (m_max < 1) throw BetaError(ErrorKind::InvalidArgument, "m_max must be >= 1");
  omega_.reserve(static_cast<std::size_t>(m_max));
  lambda_.reserve(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) {
    omega_.push_back(betaexp::omega(m, abs_tol));
    lambda_.push_back(betaexp::lambda(m, abs_tol));
  }
}

const Real& golden_ratio() {
  static const Real phi = (1 + boost::multiprecision::sqrt(Real(5))) / 2;
  return phi;
}

}  // namespace betaexp

#pragma once

#include "betaexp/binary_word.hpp"
#include "betaexp/real.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace betaexp {

/// A validated base beta in (1,2) together with the working tolerance and the constants
/// every other module keeps recomputing.
class BetaContext {
 public:
  static constexpr int kDefaultPrecisionBits = 128;

  /// Default comparison tolerance, 2^-64.
  static Real default_tolerance();

  /// Throws BetaError(InvalidArgument) unless 1 < beta < 2, 1 <= precision_bits <= 128 and
  /// tolerance >= 0.
  explicit BetaContext(const Real& beta, int precision_bits = kDefaultPrecisionBits,
                       const Real& tolerance = default_tolerance());

  const Real& beta() const noexcept { return beta_; }
  int precision_bits() const noexcept { return precision_bits_; }
  const Real& tolerance() const noexcept { return tolerance_; }

  /// Right end of the support interval [0, 1/(beta-1)].
  const Real& one_over_beta_minus_one() const noexcept { return support_hi_; }
  /// 1/(beta^2-1): T0 maps it to core_hi.
  const Real& core_lo() const noexcept { return core_lo_; }
  /// beta/(beta^2-1): T1 maps it to core_lo.
  const Real& core_hi() const noexcept { return core_hi_; }

  /// lo - tol <= y <= hi + tol.
  bool in_closed(const Real& y, const Real& lo, const Real& hi) const {
    return y >= lo - tolerance_ && y <= hi + tolerance_;
  }
  /// y in [0, 1/(beta-1)] up to tolerance.
  bool in_support(const Real& y) const { return in_closed(y, Real(0), support_hi_); }
  /// y strictly inside (0, 1/(beta-1)) by more than the tolerance.
  bool in_support_interior(const Real& y) const {
    return y > tolerance_ && y < support_hi_ - tolerance_;
  }

 private:
  Real beta_;
  int precision_bits_;
  Real tolerance_;
  Real support_hi_;
  Real core_lo_;
  Real core_hi_;
};

/// beta*x - digit.
Real apply_map(const BetaContext& ctx, int digit, const Real& x);

/// Closed form beta^k x - sum_n eps_n beta^(k-n) for a word of length k.
Real apply_word(const BetaContext& ctx, const BinaryWord& word, const Real& x);

/// The same value by composing apply_map left to right.
Real iterate_word(const BetaContext& ctx, const BinaryWord& word, const Real& x);

enum class PolynomialFamily { P1, P2, P3, Lambda };

std::string to_string(PolynomialFamily family);

/// One member of the threshold polynomial families, stored as exponent -> coefficient.
struct PolynomialSpec {
  PolynomialFamily family;
  int m;
  std::map<int, int> coefficients;

  /// Throws BetaError(InvalidArgument) for m < 1.
  static PolynomialSpec make(PolynomialFamily family, int m);

  int degree() const;
  Real evaluate(const Real& x) const;
  Real derivative(const Real& x) const;
  double evaluate(double x) const;

  /// "x^5-x^4-x^2+1".
  std::string to_ascii() const;
  /// "x⁵−x⁴−x²+1".
  std::string to_unicode() const;
};

struct RootOptions {
  double abs_tol = 1e-9;
  double scan_step = 1e-3;
  /// Scan starts at 1 + offset so the root at x = 1 of P1, P2 and Lambda is skipped.
  double scan_offset = 1e-9;
};

/// Smallest root in (1+offset, 2) located by a sign-change scan followed by bisection.
/// Throws BetaError(NoRootFound) when the scan sees no sign change.
Real smallest_root_above_one(const PolynomialSpec& spec, const RootOptions& options = {});
Real smallest_root_above_one(const PolynomialSpec& spec, double abs_tol);

struct OmegaDetail {
  std::array<Real, 3> family_roots;  // P1, P2, P3
  PolynomialFamily attained_by;
  Real value;
};

OmegaDetail omega_detail(int m, double abs_tol = 1e-9);
/// min over the P1, P2, P3 roots. Throws InvalidArgument for m < 1.
Real omega(int m, double abs_tol = 1e-9);
/// Smallest root above one of x^(m+3) - x^(m+2) - x^(m+1) + 1.
Real lambda(int m, double abs_tol = 1e-9);

/// Precomputed omega_m and lambda_m for m = 1..m_max. Immutable once built.
class ThresholdTable {
 public:
  explicit ThresholdTable(int m_max, double abs_tol = 1e-9);

  int m_max() const noexcept { return static_cast<int>(omega_.size()); }
  const Real& omega(int m) const { return omega_.at(static_cast<std::size_t>(m - 1)); }
  const Real& lambda(int m) const { return lambda_.at(static_cast<std::size_t>(m - 1)); }

 private:
  std::vector<Real> omega_;
  std::vector<Real> lambda_;
};

/// (1 + sqrt 5) / 2.
const Real& golden_ratio();

}  // namespace betaexp

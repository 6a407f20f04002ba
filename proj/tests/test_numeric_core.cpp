#include "betaexp/errors.hpp"
#include "betaexp/numeric_core.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace betaexp;

namespace {

double rel(const Real& a, const Real& b) { return static_cast<double>(abs(a - b)); }

}  // namespace

TEST(BetaContext, RejectsOutOfRange) {
  EXPECT_THROW(BetaContext(Real(1)), BetaError);
  EXPECT_THROW(BetaContext(Real(2)), BetaError);
  EXPECT_THROW(BetaContext(Real("1.5"), 0), BetaError);
  EXPECT_THROW(BetaContext(Real("1.5"), 129), BetaError);
  EXPECT_THROW(BetaContext(Real("1.5"), 128, Real(-1)), BetaError);
  EXPECT_NO_THROW(BetaContext(Real("1.5"), 64, Real(0)));
}

TEST(BetaContext, CoreEndpointsSwap) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const BetaContext ctx(oracle::uniform_real(rng, 1.0001, 1.9999));
    EXPECT_LT(ctx.core_lo(), ctx.core_hi());
    EXPECT_LT(ctx.core_hi(), ctx.one_over_beta_minus_one());
    EXPECT_LT(rel(apply_map(ctx, 0, ctx.core_lo()), ctx.core_hi()), 1e-30);
    EXPECT_LT(rel(apply_map(ctx, 1, ctx.core_hi()), ctx.core_lo()), 1e-30);
  }
}

TEST(Maps, Examples) {
  const BetaContext ctx(parse_real("1.5"));
  EXPECT_EQ(apply_map(ctx, 0, Real(0)), Real(0));
  EXPECT_EQ(apply_map(ctx, 1, Real(1)), parse_real("0.5"));
  EXPECT_EQ(apply_word(ctx, BinaryWord(""), parse_real("0.3")), parse_real("0.3"));

  const BetaContext b18(parse_real("1.8"));
  const Real x = parse_real("0.7");
  const Real expected = b18.beta() * (b18.beta() * x - 1);
  EXPECT_LT(rel(apply_word(b18, BinaryWord("10"), x), expected), 1e-35);
}

TEST(Maps, ClosedFormMatchesIteration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const BetaContext ctx(oracle::uniform_real(rng, 1.01, 1.99));
    const Real x = oracle::uniform_real(rng, 0.0, static_cast<double>(ctx.one_over_beta_minus_one()));
    BinaryWord w;
    const auto len = rng() % 31;
    for (std::size_t i = 0; i < len; ++i) w.push_back(static_cast<int>(rng() & 1));
    EXPECT_LT(rel(apply_word(ctx, w, x), iterate_word(ctx, w, x)), std::ldexp(1.0, -64));
  }
}

TEST(Maps, OnesFromCorePowers) {
  // T1^k(b^n/(b^2-1)) = (b^(n+k) - b^(k+1) - b^k + b + 1)/(b^2-1).
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const BetaContext ctx(oracle::uniform_real(rng, 1.01, 1.99));
    const Real& b = ctx.beta();
    const int n = static_cast<int>(rng() % 6);
    const int k = static_cast<int>(rng() % 11);
    const Real start = pow(b, n) / (b * b - 1);
    const Real closed = (pow(b, n + k) - pow(b, k + 1) - pow(b, k) + b + 1) / (b * b - 1);
    EXPECT_LT(rel(iterate_word(ctx, BinaryWord::ones(static_cast<std::size_t>(k)), start), closed), 1e-28);
  }
}

TEST(Polynomials, CoefficientsAndStrings) {
  EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P1, 1).to_ascii(), "x^7-x^4-x^3-x^2+x+1");
  EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P2, 1).to_unicode(), "x⁵−x⁴−x²+1");
  EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P3, 2).to_ascii(), "x^7-x-1");
  EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P1, 10).to_ascii(), "x^43-x^22-x^12-x^11+x+1");
  EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P1, 100).degree(), 403);
  EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::Lambda, 10).to_unicode(), "x¹³−x¹²−x¹¹+1");
  EXPECT_THROW(PolynomialSpec::make(PolynomialFamily::P1, 0), BetaError);
}

TEST(Polynomials, ValueAtOne) {
  for (int m = 1; m <= 12; ++m) {
    EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P1, m).evaluate(Real(1)), Real(0));
    EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P2, m).evaluate(Real(1)), Real(0));
    EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::P3, m).evaluate(Real(1)), Real(-1));
    EXPECT_EQ(PolynomialSpec::make(PolynomialFamily::Lambda, m).evaluate(Real(1)), Real(0));
  }
}

TEST(Roots, MatchReferenceDigits) {
  for (const auto& row : oracle::kRoots) {
    const PolynomialFamily fams[] = {PolynomialFamily::P1, PolynomialFamily::P2, PolynomialFamily::P3,
                                     PolynomialFamily::Lambda};
    const char* expected[] = {row.p1, row.p2, row.p3, row.lambda};
    for (int i = 0; i < 4; ++i) {
      const Real root = smallest_root_above_one(PolynomialSpec::make(fams[i], row.m), 1e-30);
      EXPECT_LT(rel(root, parse_real(expected[i])), 1e-22) << "m=" << row.m << " family " << i;
    }
  }
}

TEST(Roots, PublishedTableValues) {
  EXPECT_NEAR(static_cast<double>(omega(1)), 1.07445, 5e-6);
  EXPECT_NEAR(static_cast<double>(omega(2)), 1.02838, 5e-6);
  EXPECT_NEAR(static_cast<double>(omega(3)), 1.01492, 5e-6);
  EXPECT_NEAR(static_cast<double>(lambda(1)), 1.32472, 5e-6);
  EXPECT_NEAR(static_cast<double>(lambda(2)), 1.46557, 5e-6);
  EXPECT_NEAR(static_cast<double>(lambda(3)), 1.53416, 5e-6);
  EXPECT_NEAR(static_cast<double>(lambda(10)), 1.61575, 5e-6);
  EXPECT_NEAR(static_cast<double>(lambda(100)), 1.61804, 1.5e-5);
  EXPECT_NEAR(static_cast<double>(smallest_root_above_one(PolynomialSpec::make(PolynomialFamily::P3, 1))), 1.16730,
              5e-6);
}

TEST(Roots, OmegaTenFollowsItsPolynomial) {
  // The printed 1.00172 is not a root of x^43-x^22-x^12-x^11+x+1; the root is 1.0017555.
  EXPECT_NEAR(static_cast<double>(omega(10)), 1.0017555, 1e-7);
  EXPECT_GT(std::abs(PolynomialSpec::make(PolynomialFamily::P1, 10).evaluate(1.00172)), 1e-6);
}

TEST(Roots, OmegaIsTheSmallestFamilyRoot) {
  for (int m : {1, 2, 3, 7}) {
    const OmegaDetail d = omega_detail(m, 1e-25);
    const Real smallest = std::min({d.family_roots[0], d.family_roots[1], d.family_roots[2]});
    EXPECT_EQ(d.value, smallest);
    EXPECT_EQ(d.attained_by, PolynomialFamily::P1);
  }
}

TEST(Roots, SequencesAreMonotoneWithLimits) {
  const ThresholdTable table(31, 1e-20);
  for (int m = 1; m <= 30; ++m) {
    EXPECT_LT(table.omega(m + 1), table.omega(m));
    EXPECT_LT(table.lambda(m), table.lambda(m + 1));
  }
  EXPECT_LT(omega(100), parse_real("1.0001"));
  EXPECT_LT(rel(lambda(100), golden_ratio()), 1e-4);
}

TEST(Roots, ResidualIsSmall) {
  for (int m = 1; m <= 20; ++m) {
    for (auto fam : {PolynomialFamily::P1, PolynomialFamily::P2, PolynomialFamily::P3, PolynomialFamily::Lambda}) {
      const auto spec = PolynomialSpec::make(fam, m);
      const double tol = 1e-12;
      const Real r = smallest_root_above_one(spec, tol);
      const Real h("1e-20");
      const Real slope = (spec.evaluate(r + h) - spec.evaluate(r - h)) / (2 * h);
      EXPECT_LE(abs(spec.evaluate(r)), 10 * tol * abs(slope));
    }
  }
}

TEST(Roots, NoSignChangeIsReported) {
  PolynomialSpec spec = PolynomialSpec::make(PolynomialFamily::P3, 1);
  spec.coefficients = {{2, 1}, {0, 1}};
  try {
    smallest_root_above_one(spec);
    FAIL() << "expected NoRootFound";
  } catch (const BetaError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRootFound);
  }
}

TEST(RealText, ParseAndFormat) {
  EXPECT_EQ(parse_real("1.5"), Real(3) / 2);
  EXPECT_EQ(parse_real("-2e-3"), Real(-2) / 1000);
  EXPECT_THROW(parse_real("1.5x"), BetaError);
  EXPECT_THROW(parse_real(""), BetaError);
  const Real v = Real(1) / 3;
  EXPECT_EQ(parse_real(format_real(v)), v);
  EXPECT_EQ(format_fixed(parse_real("1.074454609"), 5), "1.07445");
}

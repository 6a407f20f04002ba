#pragma once

#include "betaexp/numeric_core.hpp"
#include "betaexp/real.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace betaexp {

constexpr int kDefaultBoundMmax = 64;

// Lower bound on the lower growth rate for beta below the golden ratio.
// Throws OutOfDomain for beta >= (1+sqrt5)/2.
Real kappa(const BetaContext& ctx);

// Shared omega_m / lambda_m table at abs_tol 1e-30, grown on demand.
const Real& cached_omega(int m);
const Real& cached_lambda(int m);

struct UpperBound {
  int m = 0;
  double value = 0;  // log2(2^m - 1) / m
  Real threshold;    // 2^(1/m); valid for beta in (threshold, 2)
};

UpperBound cap_bound(int m);

struct LocalDimBound {
  std::string source;  // "kappa", "omega" or "lambda"
  std::optional<int> m;
  double value = 0;
  bool applicable = false;
};

struct BoundReport {
  Real beta;
  std::optional<double> kappa;
  std::optional<int> best_m_omega;
  std::optional<double> omega_bound;  // 2m/(2m+1)
  std::optional<int> best_m_lambda;
  std::optional<double> lambda_bound;  // 1/(m+2)
  std::optional<double> best_lower;
  std::string best_lower_source;

  std::vector<UpperBound> upper_bounds;  // applicable entries only, m ascending
  std::vector<LocalDimBound> local_dim_upper;

  // Smallest applicable growth upper bound; 1 (N_k <= 2^k) when none applies.
  double min_upper() const;
  std::optional<double> local_dim_min() const;
};

// Lower growth bounds only (kappa, omega and lambda families).
BoundReport best_lower_bounds(const Real& beta, int m_max = kDefaultBoundMmax);

// Candidate upper bounds on the upper local dimension of the Bernoulli convolution.
std::vector<LocalDimBound> local_dim_upper(const BetaContext& ctx, int m_max = kDefaultBoundMmax);

BoundReport bound_report(const BetaContext& ctx, int m_max = kDefaultBoundMmax);

// Smallest gap between distinct points of L(m, beta) = { sum_{n<=m} e_n beta^-n }.
// beta may be 2. Points closer than 1e-13 count as equal.
double min_gap(double beta, int m);
bool separation_holds(double beta, int m);
bool separation_holds(const BetaContext& ctx, int m);

struct DeltaWitness {
  int m = 0;
  double delta = 0;      // separation observed on (2 - delta, 2)
  double threshold = 0;  // 2 - delta
  bool rigorous = false;
};

// Grid (step 1e-3) down from 2 to the first failure, then bisection to abs_tol.
DeltaWitness delta_search(int m, double abs_tol = 1e-9);

// T_d^{-m}(y) by iterating the inverse map, and the closed forms of the two identities.
Real inverse_iterate(const BetaContext& ctx, int digit, int m, const Real& y);
Real inverse_one_of_zero(const BetaContext& ctx, int m);            // (beta^m - 1)/(beta^m (beta - 1))
Real inverse_zero_of_endpoint(const BetaContext& ctx, int m);       // 1/(beta^m (beta - 1))

void write_records(std::ostream& out, const BoundReport& report);
void write_table(std::ostream& out, const BoundReport& report);
void write_csv(std::ostream& out, const BoundReport& report);

}  // namespace betaexp

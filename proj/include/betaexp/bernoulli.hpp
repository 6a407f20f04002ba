#pragma once

#include "betaexp/numeric_core.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace betaexp {

enum class MeasureMethod { Recursion, MonteCarlo };

std::string to_string(MeasureMethod method);
MeasureMethod parse_measure_method(const std::string& name);

constexpr int kMaxRecursionDepth = 48;
constexpr std::size_t kRecursionNodeBudget = 20'000'000;
constexpr int kMonteCarloShards = 64;

struct MeasureEstimate {
  double lo = 0;
  double hi = 0;
  double value = 0;       // midpoint of the bracket
  double half_width = 0;  // the true measure lies in value +- half_width
  int depth = 0;
  MeasureMethod method = MeasureMethod::Recursion;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
};

// mu(E) = 1/2 mu(beta E) + 1/2 mu(beta E - 1), unrolled `depth` times. Leaves still
// straddling the support edge are bracketed by [0, 1].
MeasureEstimate measure_interval(const BetaContext& ctx, double lo, double hi, int depth);

// Fraction of random digit sequences, truncated at `depth`, whose sum lands in [lo, hi].
// Half-width is half the inner/outer truncation gap plus one standard error.
MeasureEstimate measure_monte_carlo(const BetaContext& ctx, double lo, double hi,
                                    std::uint64_t samples, int depth, std::uint64_t seed);

struct LocalDimOptions {
  MeasureMethod method = MeasureMethod::Recursion;
  // Recursion for the ball of radius beta^-k starts at depth k + extra_depth and deepens in
  // steps of 2 until half_width <= target_relative_width * value or the depth cap is hit.
  int extra_depth = 6;
  double target_relative_width = 0.1;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

struct LocalDimEstimate {
  double x = 0;
  std::vector<int> ks;
  std::vector<double> radii;         // beta^-k
  std::vector<double> log_measures;  // natural log of the ball measure
  std::vector<double> half_widths;
  double slope_lower = 0;  // min of log mu / log r over the top third of the k range
  double slope_upper = 0;  // max over the same window
};

// Throws Unstable when a ball measure is not resolved to 25% of its value.
LocalDimEstimate local_dimension(const BetaContext& ctx, double x, int k_min, int k_max,
                                 const LocalDimOptions& options = {});

void write_records(std::ostream& out, const MeasureEstimate& estimate);
void write_records(std::ostream& out, const LocalDimEstimate& estimate);

}  // namespace betaexp

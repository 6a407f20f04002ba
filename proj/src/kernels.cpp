#include "betaexp/kernels.hpp"

#include "betaexp/errors.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <limits>

namespace betaexp::kernels {

namespace {

// Value of the child reached by appending `digit`, where `word` already ends in that digit.
Real child_value(const BetaContext& ctx, const Real& x, const BinaryWord& word,
                 const Real& parent_value, int digit) {
  if (word.size() % kRecomputeInterval == 0) return apply_word(ctx, word, x);
  return apply_map(ctx, digit, parent_value);
}

struct RealNode {
  BinaryWord word;
  Real value;
};

std::vector<RealNode> expand_level(const BetaContext& ctx, const Real& x,
                                   const std::vector<RealNode>& frontier, std::size_t cap) {
  std::vector<RealNode> next;
  next.reserve(std::min(cap, 2 * frontier.size()));
  for (const auto& node : frontier) {
    for (int digit = 0; digit <= 1; ++digit) {
      BinaryWord w = node.word;
      w.push_back(digit);
      Real v = child_value(ctx, x, w, node.value, digit);
      if (ctx.in_support(v)) {
        if (next.size() >= cap) {
          throw BetaError(ErrorKind::MemoryGuard,
                          "more than " + std::to_string(cap) + " prefixes at length " +
                              std::to_string(w.size()));
        }
        next.push_back({std::move(w), std::move(v)});
      }
    }
  }
  return next;
}

PrefixSet to_prefix_set(const BetaContext& ctx, const Real& x, std::size_t k,
                        std::vector<RealNode>&& nodes) {
  PrefixSet set{ctx.beta(), x, k, {}, {}};
  set.words.reserve(nodes.size());
  set.orbit_values.reserve(nodes.size());
  for (auto& n : nodes) {
    set.words.push_back(std::move(n.word));
    set.orbit_values.push_back(std::move(n.value));
  }
  return set;
}

void dfs_collect(const BetaContext& ctx, const Real& x, std::size_t k, BinaryWord& path,
                 const Real& value, std::vector<RealNode>& out, std::atomic<std::size_t>& total,
                 std::size_t cap, std::atomic<bool>& overflow) {
  if (path.size() == k) {
    if (total.fetch_add(1, std::memory_order_relaxed) >= cap) {
      overflow.store(true, std::memory_order_relaxed);
      return;
    }
    out.push_back({path, value});
    return;
  }
  for (int digit = 0; digit <= 1 && !overflow.load(std::memory_order_relaxed); ++digit) {
    path.push_back(digit);
    const Real v = child_value(ctx, x, path, value, digit);
    if (ctx.in_support(v)) dfs_collect(ctx, x, k, path, v, out, total, cap, overflow);
    path.pop_back();
  }
}

// Double-precision filter. |true - y| <= err is maintained for every node; a node is only
// reclassified in Real when [y - err, y + err] straddles a threshold (plus a guard band).
struct Filter {
  double beta;
  double beta_err;
  double hi;
  double hi_err;
  double tol;
  double x_abs;
  // beta^r and (beta^r - 1)/(beta - 1) for r = 0..kMaxCountLength.
  std::vector<double> beta_pow;
  std::vector<double> geometric;

  static constexpr double kRoundoff = 0x1p-52;
  static constexpr double kInflate = 1.0 + 0x1p-50;
  static constexpr double kGuard = 1e-30;
};

double abs_error_to_double(const Real& exact, double approx) {
  return static_cast<double>(boost::multiprecision::abs(exact - Real(approx))) * Filter::kInflate;
}

Filter make_filter(const BetaContext& ctx, const Real& x) {
  Filter f{};
  f.beta = static_cast<double>(ctx.beta());
  f.beta_err = abs_error_to_double(ctx.beta(), f.beta);
  f.hi = static_cast<double>(ctx.one_over_beta_minus_one());
  f.hi_err = abs_error_to_double(ctx.one_over_beta_minus_one(), f.hi);
  f.tol = static_cast<double>(ctx.tolerance());
  f.x_abs = std::abs(static_cast<double>(x));
  f.beta_pow.resize(kMaxCountLength + 1);
  f.geometric.resize(kMaxCountLength + 1);
  f.beta_pow[0] = 1;
  f.geometric[0] = 0;
  for (std::size_t r = 1; r <= kMaxCountLength; ++r) {
    f.beta_pow[r] = f.beta_pow[r - 1] * f.beta;
    f.geometric[r] = f.geometric[r - 1] * f.beta + 1;
  }
  return f;
}

struct FastNode {
  double y;
  double err;
  std::uint64_t path;  // digits, most recent in the lowest bit
  std::uint32_t depth;
};

enum class Verdict { In, Out, Unsure };

inline Verdict classify(const Filter& f, double y, double err) {
  if (y + err < -f.tol - Filter::kGuard || y - err > f.hi + f.hi_err + f.tol + Filter::kGuard)
    return Verdict::Out;
  if (y - err > -f.tol + Filter::kGuard && y + err < f.hi - f.hi_err + f.tol - Filter::kGuard)
    return Verdict::In;
  return Verdict::Unsure;
}

// Returns false if the child leaves the support interval.
inline bool make_child(const BetaContext& ctx, const Real& x, const Filter& f,
                       const FastNode& parent, int digit, FastNode& child) {
  const double y = std::fma(f.beta, parent.y, -static_cast<double>(digit));
  const double err = ((f.beta + f.beta_err) * parent.err + f.beta_err * std::abs(parent.y) +
                      Filter::kRoundoff * std::abs(y)) *
                     Filter::kInflate;
  child.path = (parent.path << 1) | static_cast<std::uint64_t>(digit);
  child.depth = parent.depth + 1;
  switch (classify(f, y, err)) {
    case Verdict::In:
      child.y = y;
      child.err = err;
      return true;
    case Verdict::Out:
      return false;
    case Verdict::Unsure:
      break;
  }
  const Real exact = apply_word(ctx, BinaryWord::from_bits(child.path, child.depth), x);
  if (!ctx.in_support(exact)) return false;
  child.y = static_cast<double>(exact);
  // Real itself carries roughly 2^-120 relative error amplified by beta per level.
  const double real_err = std::ldexp((f.x_abs + f.hi) * std::pow(f.beta, child.depth) *
                                         (child.depth + 1.0),
                                     -120);
  child.err = (Filter::kRoundoff * std::abs(child.y) + real_err) * Filter::kInflate;
  return true;
}

// Every word of length r keeps y inside the support iff the two extreme words do: all-ones
// gives the minimum beta^r y - (beta^r-1)/(beta-1), all-zeros the maximum beta^r y, and both
// are monotone in the number of steps. The margin dwarfs the double rounding in these sums.
inline bool subtree_saturated(const Filter& f, const FastNode& node, std::size_t remaining) {
  const double scale = f.beta_pow[remaining];
  const double margin = 1e-9 * scale * (std::abs(node.y) + f.hi) + scale * node.err;
  const double lowest = scale * node.y - f.geometric[remaining];
  const double highest = scale * node.y;
  return lowest - margin > -f.tol && highest + margin < f.hi - f.hi_err + f.tol;
}

void dfs_count(const BetaContext& ctx, const Real& x, const Filter& f, const FastNode& node,
               std::size_t k_max, std::vector<std::uint64_t>& counts) {
  if (node.depth == k_max) return;
  const std::size_t remaining = k_max - node.depth;
  if (remaining > 1 && subtree_saturated(f, node, remaining)) {
    for (std::size_t j = 1; j <= remaining; ++j) counts[node.depth + j] += std::uint64_t{1} << j;
    return;
  }
  FastNode child;
  for (int digit = 0; digit <= 1; ++digit) {
    if (make_child(ctx, x, f, node, digit, child)) {
      ++counts[child.depth];
      dfs_count(ctx, x, f, child, k_max, counts);
    }
  }
}

void dfs_count_real(const BetaContext& ctx, const Real& x, BinaryWord& path, const Real& value,
                    std::size_t k_max, std::vector<std::uint64_t>& counts) {
  if (path.size() == k_max) return;
  for (int digit = 0; digit <= 1; ++digit) {
    path.push_back(digit);
    const Real v = child_value(ctx, x, path, value, digit);
    if (ctx.in_support(v)) {
      ++counts[path.size()];
      dfs_count_real(ctx, x, path, v, k_max, counts);
    }
    path.pop_back();
  }
}

void check_count_length(std::size_t k_max) {
  if (k_max > kMaxCountLength) {
    throw BetaError(ErrorKind::InvalidArgument,
                    "counting supports lengths up to " + std::to_string(kMaxCountLength));
  }
}

}  // namespace

PrefixSet enumerate_parallel(const BetaContext& ctx, const Real& x, std::size_t k,
                             std::size_t survivor_cap) {
  std::vector<RealNode> seeds{{BinaryWord{}, x}};
  while (!seeds.empty() && seeds.size() < kSeedTarget && seeds.front().word.size() < k) {
    seeds = expand_level(ctx, x, seeds, survivor_cap);
  }
  if (seeds.empty() || seeds.front().word.size() == k) {
    return to_prefix_set(ctx, x, k, std::move(seeds));
  }

  std::vector<std::vector<RealNode>> per_seed(seeds.size());
  std::atomic<std::size_t> total{0};
  std::atomic<bool> overflow{false};
  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (overflow.load(std::memory_order_relaxed)) continue;
    BinaryWord path = seeds[static_cast<std::size_t>(i)].word;
    dfs_collect(ctx, x, k, path, seeds[static_cast<std::size_t>(i)].value,
                per_seed[static_cast<std::size_t>(i)], total, survivor_cap, overflow);
  }
  if (overflow.load()) {
    throw BetaError(ErrorKind::MemoryGuard, "more than " + std::to_string(survivor_cap) +
                                                " prefixes at length " + std::to_string(k));
  }

  std::vector<RealNode> all;
  all.reserve(total.load());
  for (auto& part : per_seed)
    for (auto& node : part) all.push_back(std::move(node));
  return to_prefix_set(ctx, x, k, std::move(all));
}

std::vector<std::uint64_t> count_parallel(const BetaContext& ctx, const Real& x,
                                          std::size_t k_max) {
  check_count_length(k_max);
  const Filter f = make_filter(ctx, x);
  std::vector<std::uint64_t> counts(k_max + 1, 0);
  counts[0] = 1;

  const double x_d = static_cast<double>(x);
  std::vector<FastNode> seeds{{x_d, abs_error_to_double(x, x_d), 0, 0}};
  while (!seeds.empty() && seeds.size() < kSeedTarget && seeds.front().depth < k_max) {
    std::vector<FastNode> next;
    next.reserve(2 * seeds.size());
    FastNode child;
    for (const auto& node : seeds)
      for (int digit = 0; digit <= 1; ++digit)
        if (make_child(ctx, x, f, node, digit, child)) next.push_back(child);
    seeds = std::move(next);
    if (!seeds.empty()) counts[seeds.front().depth] = seeds.size();
  }
  if (seeds.empty() || seeds.front().depth == k_max) return counts;

  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(k_max + 1, 0);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) dfs_count(ctx, x, f, seeds[static_cast<std::size_t>(i)], k_max, local);
#pragma omp critical
    for (std::size_t d = 0; d <= k_max; ++d) counts[d] += local[d];
  }
  return counts;
}

namespace reference {

PrefixSet enumerate_serial(const BetaContext& ctx, const Real& x, std::size_t k,
                           std::size_t survivor_cap) {
  std::vector<RealNode> frontier{{BinaryWord{}, x}};
  for (std::size_t level = 0; level < k && !frontier.empty(); ++level) {
    frontier = expand_level(ctx, x, frontier, survivor_cap);
  }
  return to_prefix_set(ctx, x, k, std::move(frontier));
}

std::vector<std::uint64_t> count_serial(const BetaContext& ctx, const Real& x, std::size_t k_max) {
  check_count_length(k_max);
  std::vector<std::uint64_t> counts(k_max + 1, 0);
  counts[0] = 1;
  BinaryWord path;
  dfs_count_real(ctx, x, path, x, k_max, counts);
  return counts;
}

}  // namespace reference

}  // namespace betaexp::kernels

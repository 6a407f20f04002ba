#include "betaexp/bernoulli.hpp"

#include "betaexp/errors.hpp"

#include <nlohmann/json.hpp>

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <random>
#include <unordered_map>

namespace betaexp {

std::string to_string(MeasureMethod method) {
  return method == MeasureMethod::Recursion ? "recursion" : "monte-carlo";
}

MeasureMethod parse_measure_method(const std::string& name) {
  if (name == "recursion") return MeasureMethod::Recursion;
  if (name == "monte-carlo" || name == "mc") return MeasureMethod::MonteCarlo;
  throw BetaError(ErrorKind::InvalidArgument, "unknown method '" + name + "'");
}

namespace {

struct Bracket {
  double lower = 0;
  double upper = 0;
};

struct Key {
  int depth;
  std::int64_t lo;
  std::int64_t hi;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.lo) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.hi) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h ^ static_cast<std::uint64_t>(k.depth));
  }
};

class Recursion {
 public:
  Recursion(double beta, int depth) : beta_(beta), c_(1.0 / (beta - 1.0)), depth_(depth) {}

  Bracket eval(double a, double b, int d) {
    if (b < 0 || a > c_) return {0, 0};
    if (a <= 0 && b >= c_) return {1, 1};
    if (d == depth_) return {0, 1};
    // Clipping to [-1, c+1] leaves the measure unchanged and keeps the memo key bounded.
    a = std::max(a, -1.0);
    b = std::min(b, c_ + 1.0);
    const Key key{d, std::llround(std::ldexp(a, 48)), std::llround(std::ldexp(b, 48))};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (++nodes_ > kRecursionNodeBudget) {
      throw BetaError(ErrorKind::MemoryGuard, "measure recursion exceeded its node budget");
    }
    const Bracket left = eval(beta_ * a, beta_ * b, d + 1);
    const Bracket right = eval(beta_ * a - 1, beta_ * b - 1, d + 1);
    const Bracket out{0.5 * (left.lower + right.lower), 0.5 * (left.upper + right.upper)};
    memo_.emplace(key, out);
    return out;
  }

 private:
  double beta_;
  double c_;
  int depth_;
  std::size_t nodes_ = 0;
  std::unordered_map<Key, Bracket, KeyHash> memo_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Exact answers for intervals covering or missing the support.
bool trivial_measure(double c, double lo, double hi, MeasureEstimate& out) {
  if (hi < 0 || lo > c || hi < lo) {
    out.value = 0;
    return true;
  }
  if (lo <= 0 && hi >= c) {
    out.value = 1;
    return true;
  }
  return false;
}

}  // namespace

MeasureEstimate measure_interval(const BetaContext& ctx, double lo, double hi, int depth) {
  if (depth < 0 || depth > kMaxRecursionDepth) {
    throw BetaError(ErrorKind::DepthExceeded,
                    "recursion depth must lie in [0, " + std::to_string(kMaxRecursionDepth) + "]");
  }
  MeasureEstimate out;
  out.lo = lo;
  out.hi = hi;
  out.depth = depth;
  out.method = MeasureMethod::Recursion;
  const double beta = static_cast<double>(ctx.beta());
  if (trivial_measure(1.0 / (beta - 1.0), lo, hi, out)) return out;
  Recursion rec(beta, depth);
  const Bracket b = rec.eval(lo, hi, 0);
  out.value = 0.5 * (b.lower + b.upper);
  out.half_width = 0.5 * (b.upper - b.lower);
  return out;
}

MeasureEstimate measure_monte_carlo(const BetaContext& ctx, double lo, double hi,
                                    std::uint64_t samples, int depth, std::uint64_t seed) {
  if (samples == 0) throw BetaError(ErrorKind::InvalidArgument, "samples must be >= 1");
  if (depth < 1 || depth > 64) throw BetaError(ErrorKind::DepthExceeded, "sampling depth must lie in [1, 64]");
  MeasureEstimate out;
  out.lo = lo;
  out.hi = hi;
  out.depth = depth;
  out.method = MeasureMethod::MonteCarlo;
  out.seed = seed;
  out.samples = samples;
  const double beta = static_cast<double>(ctx.beta());
  const double c = 1.0 / (beta - 1.0);
  if (trivial_measure(c, lo, hi, out)) return out;

  // table[j][byte]: contribution of digits 8j+1 .. 8j+8 (first digit in the high bit).
  const int chunks = (depth + 7) / 8;
  std::vector<std::array<double, 256>> table(static_cast<std::size_t>(chunks));
  for (int j = 0; j < chunks; ++j) {
    for (int byte = 0; byte < 256; ++byte) {
      double sum = 0;
      for (int i = 0; i < 8; ++i) {
        const int n = 8 * j + i + 1;
        if (n <= depth && ((byte >> (7 - i)) & 1)) sum += std::pow(beta, -n);
      }
      table[static_cast<std::size_t>(j)][static_cast<std::size_t>(byte)] = sum;
    }
  }
  const double tail = std::pow(beta, -depth) / (beta - 1.0);

  // The full sum lies in [S, S + tail].
  std::array<std::uint64_t, kMonteCarloShards> inner{};
  std::array<std::uint64_t, kMonteCarloShards> outer{};
#pragma omp parallel for schedule(static)
  for (int shard = 0; shard < kMonteCarloShards; ++shard) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(shard))));
    const std::uint64_t n = samples / kMonteCarloShards +
                            (static_cast<std::uint64_t>(shard) < samples % kMonteCarloShards ? 1 : 0);
    std::uint64_t in = 0;
    std::uint64_t out_count = 0;
    for (std::uint64_t s = 0; s < n; ++s) {
      double sum = 0;
      std::uint64_t bits = 0;
      for (int j = 0; j < chunks; ++j) {
        if (j % 8 == 0) bits = rng();
        sum += table[static_cast<std::size_t>(j)][(bits >> (56 - 8 * (j % 8))) & 0xFF];
      }
      if (sum >= lo && sum + tail <= hi) ++in;
      if (sum <= hi && sum + tail >= lo) ++out_count;
    }
    inner[static_cast<std::size_t>(shard)] = in;
    outer[static_cast<std::size_t>(shard)] = out_count;
  }
  std::uint64_t in = 0;
  std::uint64_t out_count = 0;
  for (int s = 0; s < kMonteCarloShards; ++s) {
    in += inner[static_cast<std::size_t>(s)];
    out_count += outer[static_cast<std::size_t>(s)];
  }
  const double n = static_cast<double>(samples);
  const double p_in = static_cast<double>(in) / n;
  const double p_out = static_cast<double>(out_count) / n;
  out.value = 0.5 * (p_in + p_out);
  out.half_width = 0.5 * (p_out - p_in) + std::sqrt(out.value * (1.0 - out.value) / n);
  return out;
}

LocalDimEstimate local_dimension(const BetaContext& ctx, double x, int k_min, int k_max,
                                 const LocalDimOptions& options) {
  const double beta = static_cast<double>(ctx.beta());
  const double c = 1.0 / (beta - 1.0);
  if (!(x > 0 && x < c)) throw BetaError(ErrorKind::InvalidPoint, "x must lie strictly inside the support");
  if (k_min < 1 || k_max < k_min) throw BetaError(ErrorKind::InvalidArgument, "need 1 <= k_min <= k_max");

  LocalDimEstimate est;
  est.x = x;
  const auto count = static_cast<std::size_t>(k_max - k_min + 1);
  std::vector<MeasureEstimate> balls(count);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = k_max; k >= k_min; --k) {
    try {
      const double r = std::pow(beta, -k);
      int depth = std::min(kMaxRecursionDepth, k + options.extra_depth);
      MeasureEstimate m;
      if (options.method == MeasureMethod::Recursion) {
        m = measure_interval(ctx, x - r, x + r, depth);
        while (m.half_width > options.target_relative_width * m.value && depth < kMaxRecursionDepth) {
          depth = std::min(kMaxRecursionDepth, depth + 2);
          m = measure_interval(ctx, x - r, x + r, depth);
        }
      } else {
        m = measure_monte_carlo(ctx, x - r, x + r, options.samples, std::min(64, depth + 16), options.seed);
      }
      balls[static_cast<std::size_t>(k - k_min)] = m;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (int k = k_min; k <= k_max; ++k) {
    const MeasureEstimate& m = balls[static_cast<std::size_t>(k - k_min)];
    if (!(m.value > 0) || m.half_width > 0.25 * m.value) {
      throw BetaError(ErrorKind::Unstable, "ball of radius beta^-" + std::to_string(k) + " at x = " +
                                               std::to_string(x) + " has measure " + std::to_string(m.value) +
                                               " +- " + std::to_string(m.half_width));
    }
    est.ks.push_back(k);
    est.radii.push_back(std::pow(beta, -k));
    est.log_measures.push_back(std::log(m.value));
    est.half_widths.push_back(m.half_width);
  }
  const std::size_t n = est.ks.size();
  const std::size_t window = (n + 2) / 3;
  est.slope_lower = INFINITY;
  est.slope_upper = -INFINITY;
  for (std::size_t i = n - window; i < n; ++i) {
    const double ratio = est.log_measures[i] / std::log(est.radii[i]);
    est.slope_lower = std::min(est.slope_lower, ratio);
    est.slope_upper = std::max(est.slope_upper, ratio);
  }
  return est;
}

void write_records(std::ostream& out, const MeasureEstimate& e) {
  nlohmann::json rec = {{"record", "measure"},      {"lo", e.lo},
                        {"hi", e.hi},               {"value", e.value},
                        {"half_width", e.half_width}, {"method", to_string(e.method)},
                        {"depth", e.depth},         {"seed", e.seed},
                        {"samples", e.samples}};
  out << rec.dump() << '\n';
}

void write_records(std::ostream& out, const LocalDimEstimate& e) {
  nlohmann::json head = {{"record", "local_dimension"},
                         {"x", e.x},
                         {"slope_lower", e.slope_lower},
                         {"slope_upper", e.slope_upper},
                         {"points", e.ks.size()}};
  out << head.dump() << '\n';
  for (std::size_t i = 0; i < e.ks.size(); ++i) {
    nlohmann::json row = {{"record", "ball"},
                          {"k", e.ks[i]},
                          {"radius", e.radii[i]},
                          {"log_measure", e.log_measures[i]},
                          {"half_width", e.half_widths[i]}};
    out << row.dump() << '\n';
  }
}

}  // namespace betaexp

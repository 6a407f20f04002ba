#include "betaexp/prefix_engine.hpp"

#include "betaexp/errors.hpp"
#include "betaexp/kernels.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace betaexp {

bool PrefixSet::contains(const BinaryWord& word) const {
  return std::binary_search(words.begin(), words.end(), word);
}

std::optional<Real> PrefixSet::orbit_value(const BinaryWord& word) const {
  auto it = std::lower_bound(words.begin(), words.end(), word);
  if (it == words.end() || !(*it == word)) return std::nullopt;
  return orbit_values[static_cast<std::size_t>(it - words.begin())];
}

void require_in_support(const BetaContext& ctx, const Real& x) {
  if (!ctx.in_support(x)) {
    throw BetaError(ErrorKind::InvalidPoint,
                    "x = " + format_real(x) + " lies outside [0, 1/(beta-1)] = [0, " +
                        format_real(ctx.one_over_beta_minus_one()) + "]");
  }
}

PrefixSet enumerate_prefixes_branching(const BetaContext& ctx, const Real& x, std::size_t k,
                                       std::size_t survivor_cap) {
  require_in_support(ctx, x);
  return kernels::enumerate_parallel(ctx, x, k, survivor_cap);
}

PrefixSet enumerate_prefixes_direct(const BetaContext& ctx, const Real& x, std::size_t k,
                                    std::size_t cap) {
  if (k > cap) {
    throw BetaError(ErrorKind::CapExceeded, "direct enumeration of 2^" + std::to_string(k) +
                                                " words exceeds the cap 2^" + std::to_string(cap));
  }
  require_in_support(ctx, x);

  // sum_n eps_n beta^-n split into a leading and a trailing half, each tabulated once.
  std::vector<Real> inv_pow(k + 1);
  inv_pow[0] = 1;
  for (std::size_t n = 1; n <= k; ++n) inv_pow[n] = inv_pow[n - 1] / ctx.beta();
  const std::size_t head = k / 2;
  const std::size_t tail = k - head;
  auto partial_sums = [&](std::size_t first, std::size_t len) {
    std::vector<Real> sums(std::size_t{1} << len);
    for (std::size_t mask = 0; mask < sums.size(); ++mask) {
      Real s = 0;
      for (std::size_t i = 0; i < len; ++i)
        if ((mask >> (len - 1 - i)) & 1u) s += inv_pow[first + i + 1];
      sums[mask] = s;
    }
    return sums;
  };
  const std::vector<Real> head_sums = partial_sums(0, head);
  const std::vector<Real> tail_sums = partial_sums(head, tail);

  const Real& tol = ctx.tolerance();
  const Real lower = x - inv_pow[k] * (ctx.one_over_beta_minus_one() + tol);
  const Real upper = x + inv_pow[k] * tol;
  const Real beta_k = boost::multiprecision::pow(ctx.beta(), static_cast<int>(k));

  PrefixSet set{ctx.beta(), x, k, {}, {}};
  for (std::size_t a = 0; a < head_sums.size(); ++a) {
    for (std::size_t b = 0; b < tail_sums.size(); ++b) {
      const Real s = head_sums[a] + tail_sums[b];
      if (s < lower || s > upper) continue;
      set.words.push_back(BinaryWord::from_bits((std::uint64_t{a} << tail) | b, k));
      set.orbit_values.push_back(beta_k * (x - s));
    }
  }
  return set;
}

std::uint64_t count_prefixes(const BetaContext& ctx, const Real& x, std::size_t k) {
  return count_prefixes_by_length(ctx, x, k).back();
}

std::vector<std::uint64_t> count_prefixes_by_length(const BetaContext& ctx, const Real& x,
                                                    std::size_t k_max) {
  require_in_support(ctx, x);
  return kernels::count_parallel(ctx, x, k_max);
}

bool is_prefix(const BetaContext& ctx, const Real& x, const BinaryWord& word) {
  return ctx.in_support(x) && ctx.in_support(apply_word(ctx, word, x));
}

double GrowthEstimate::slope_at(std::size_t k) const {
  for (std::size_t i = 0; i < k_values.size(); ++i)
    if (k_values[i] == k) return log2_counts[i] / static_cast<double>(k);
  throw BetaError(ErrorKind::InvalidArgument, "k = " + std::to_string(k) + " not in estimate");
}

GrowthEstimate growth_estimate(const BetaContext& ctx, const Real& x, std::size_t k_min,
                               std::size_t k_max, std::uint64_t count_cap) {
  if (k_min < 8 || k_min > k_max || k_max > kMaxCountLength) {
    throw BetaError(ErrorKind::InvalidArgument,
                    "growth estimate needs 8 <= k_min <= k_max <= " + std::to_string(kMaxCountLength));
  }
  const auto counts = count_prefixes_by_length(ctx, x, k_max);
  GrowthEstimate est;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    if (counts[k] > count_cap) {
      throw BetaError(ErrorKind::MemoryGuard, "N_" + std::to_string(k) + " = " +
                                                  std::to_string(counts[k]) + " exceeds the cap");
    }
    est.k_values.push_back(k);
    est.log2_counts.push_back(std::log2(static_cast<double>(counts[k])));
  }
  const std::size_t window_start = std::max(k_min, (k_max + 1) / 2);
  bool first = true;
  for (std::size_t i = 0; i < est.k_values.size(); ++i) {
    if (est.k_values[i] < window_start) continue;
    const double slope = est.log2_counts[i] / static_cast<double>(est.k_values[i]);
    est.lower_slope = first ? slope : std::min(est.lower_slope, slope);
    est.upper_slope = first ? slope : std::max(est.upper_slope, slope);
    first = false;
  }
  return est;
}

std::string to_text(const PrefixSet& set) {
  std::string out;
  for (const auto& w : set.words) {
    out += w.to_string();
    out += '\n';
  }
  out += "count=" + std::to_string(set.count()) + "\n";
  return out;
}

std::vector<BinaryWord> parse_text(const std::string& text) {
  std::istringstream in(text);
  std::vector<BinaryWord> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("count=", 0) == 0) {
      std::size_t declared = 0;
      try {
        declared = std::stoull(line.substr(6));
      } catch (const std::exception&) {
        throw BetaError(ErrorKind::InvalidArgument, "bad trailer '" + line + "'");
      }
      if (declared != words.size()) {
        throw BetaError(ErrorKind::InvalidArgument,
                        "trailer says " + std::to_string(declared) + " words, body has " +
                            std::to_string(words.size()));
      }
      return words;
    }
    words.emplace_back(line);
  }
  throw BetaError(ErrorKind::InvalidArgument, "missing count= trailer");
}

void write_records(std::ostream& out, const PrefixSet& set) {
  nlohmann::json header = {{"record", "prefix_set"},
                           {"beta", format_real(set.beta)},
                           {"x", format_real(set.x)},
                           {"k", set.k},
                           {"count", set.count()}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < set.count(); ++i) {
    nlohmann::json rec = {{"record", "prefix"},
                          {"word", set.words[i].to_string()},
                          {"orbit_value", format_real(set.orbit_values[i])}};
    out << rec.dump() << '\n';
  }
}

PrefixSet read_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw BetaError(ErrorKind::InvalidArgument, "empty record stream");
  PrefixSet set;
  std::size_t declared = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    if (header.at("record") != "prefix_set") throw BetaError(ErrorKind::InvalidArgument, "expected prefix_set header");
    set.beta = parse_real(header.at("beta").get<std::string>());
    set.x = parse_real(header.at("x").get<std::string>());
    set.k = header.at("k").get<std::size_t>();
    declared = header.at("count").get<std::size_t>();
    for (std::size_t i = 0; i < declared; ++i) {
      if (!std::getline(in, line)) break;
      const auto rec = nlohmann::json::parse(line);
      set.words.emplace_back(rec.at("word").get<std::string>());
      set.orbit_values.push_back(parse_real(rec.at("orbit_value").get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw BetaError(ErrorKind::InvalidArgument, std::string("malformed record: ") + e.what());
  }
  if (set.count() != declared) {
    throw BetaError(ErrorKind::InvalidArgument, "record stream truncated");
  }
  return set;
}

}  // namespace betaexp

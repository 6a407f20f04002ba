#include "betaexp/generators.hpp"

#include "betaexp/errors.hpp"
#include "betaexp/prefix_engine.hpp"

#include <nlohmann/json.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <istream>
#include <optional>
#include <ostream>

namespace betaexp {

SteeringIntervalM SteeringIntervalM::make(const BetaContext& ctx, int m) {
  if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "m must be >= 1");
  const Real& b = ctx.beta();
  const Real denom = b * b - 1;
  const Real top = boost::multiprecision::pow(b, 2 * m + 2);
  return {m, (-top + b + 1) / denom, top / denom, 1 / denom};
}

SteeringInterval SteeringInterval::make(const BetaContext& ctx) {
  const Real& b = ctx.beta();
  const Real denom = b * b - 1;
  return {(1 + b - b * b) / denom, b * b / denom, ctx.core_lo(), ctx.core_hi()};
}

std::string to_string(GeneratorMode mode) {
  return mode == GeneratorMode::Block ? "m" : "s3";
}

namespace {

constexpr std::size_t kSearchNodeBudget = 10'000'000;

// Lexicographically smallest word of exactly `length` digits taking `start` into [lo, hi]
// with every intermediate value in the support. The reachable range after r more steps is
// [beta^r (y - c) + c, beta^r y] (all ones, all zeros), which prunes the search.
class WordSearch {
 public:
  WordSearch(const BetaContext& ctx, const Real& lo, const Real& hi) : ctx_(ctx), lo_(lo), hi_(hi) {}

  std::optional<BinaryWord> find(const Real& start, std::size_t length) {
    BinaryWord path;
    if (search(start, length, path)) return path;
    return std::nullopt;
  }

  bool exhausted() const noexcept { return nodes_ > kSearchNodeBudget; }

 private:
  bool search(const Real& y, std::size_t remaining, BinaryWord& path) {
    if (++nodes_ > kSearchNodeBudget) return false;
    if (remaining == 0) return ctx_.in_closed(y, lo_, hi_);
    const Real scale = boost::multiprecision::pow(ctx_.beta(), static_cast<int>(remaining));
    const Real& c = ctx_.one_over_beta_minus_one();
    const Real highest = scale * y;
    const Real lowest = scale * (y - c) + c;
    if (highest < lo_ - ctx_.tolerance() || lowest > hi_ + ctx_.tolerance()) return false;
    for (int digit = 0; digit <= 1; ++digit) {
      const Real next = apply_map(ctx_, digit, y);
      if (!ctx_.in_support(next)) continue;
      path.push_back(digit);
      if (search(next, remaining - 1, path)) return true;
      path.pop_back();
    }
    return false;
  }

  const BetaContext& ctx_;
  Real lo_;
  Real hi_;
  std::size_t nodes_ = 0;
};

// Steps x needs under T0 (from the left) or T1 (from the right) to reach the core; the
// core cannot be jumped over, so this bounds the entry length.
std::size_t forced_run_to_core(const BetaContext& ctx, const Real& x) {
  const double beta = static_cast<double>(ctx.beta());
  const double c = static_cast<double>(ctx.one_over_beta_minus_one());
  const double xd = static_cast<double>(x);
  double ratio = 1;
  if (x < ctx.core_lo()) {
    ratio = static_cast<double>(ctx.core_lo()) / xd;
  } else if (x > ctx.core_hi()) {
    ratio = (c - static_cast<double>(ctx.core_hi())) / (c - xd);
  }
  if (!(ratio > 1) || !std::isfinite(ratio)) return ratio > 1 ? 100000 : 0;
  return static_cast<std::size_t>(std::ceil(std::log(ratio) / std::log(beta))) + 1;
}

EntryWord find_entry(const BetaContext& ctx, const Real& x, const Real& lo, const Real& hi,
                     std::size_t default_slack, const GeneratorOptions& options) {
  if (!ctx.in_support_interior(x)) {
    throw BetaError(ErrorKind::InvalidPoint, "x must lie strictly inside (0, 1/(beta-1))");
  }
  const std::size_t slack = options.entry_depth_slack ? options.entry_depth_slack : default_slack;
  const std::size_t cap = forced_run_to_core(ctx, x) + slack;
  WordSearch search(ctx, lo, hi);
  for (std::size_t length = 0; length <= cap; ++length) {
    if (auto word = search.find(x, length)) return {*word, apply_word(ctx, *word, x)};
    if (search.exhausted()) break;
  }
  throw BetaError(ErrorKind::Unreachable,
                  "no word of length <= " + std::to_string(cap) + " takes x = " + format_real(x) +
                      " into [" + format_real(lo) + ", " + format_real(hi) + "]");
}

void require_block_width(int m) {
  if (m < 1 || 2 * m + 1 > 63) {
    throw BetaError(ErrorKind::InvalidArgument, "block generator supports 1 <= m <= 31");
  }
}

void require_survivors(std::size_t bits_per_block, std::size_t num_blocks, std::size_t cap) {
  const std::size_t total_bits = bits_per_block * num_blocks;
  if (total_bits >= 63 || (std::size_t{1} << total_bits) > cap) {
    throw BetaError(ErrorKind::MemoryGuard, "2^" + std::to_string(total_bits) +
                                                " generated words exceed the survivor cap");
  }
}

template <typename Extend>
GeneratorRun run_stages(GeneratorRun run, const EntryWord& entry, std::size_t num_blocks,
                        Extend&& extend) {
  run.entry_word = entry.word;
  run.stages.push_back({{entry.word}, {entry.orbit}, entry.orbit, entry.orbit});
  for (std::size_t s = 1; s <= num_blocks; ++s) {
    const GeneratorStage& prev = run.stages.back();
    const auto n = static_cast<std::ptrdiff_t>(prev.words.size());
    std::vector<std::vector<Extension>> per_word(prev.words.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        per_word[static_cast<std::size_t>(i)] = extend(prev.orbits[static_cast<std::size_t>(i)]);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    GeneratorStage next;
    for (std::size_t i = 0; i < per_word.size(); ++i) {
      for (auto& ext : per_word[i]) {
        next.words.push_back(prev.words[i].concat(ext.block));
        next.orbits.push_back(std::move(ext.orbit));
      }
    }
    next.orbit_min = *std::min_element(next.orbits.begin(), next.orbits.end());
    next.orbit_max = *std::max_element(next.orbits.begin(), next.orbits.end());
    run.stages.push_back(std::move(next));
  }
  return run;
}

}  // namespace

EntryWord entry_word_m(const BetaContext& ctx, int m, const Real& x, const GeneratorOptions& options) {
  const auto interval = SteeringIntervalM::make(ctx, m);
  return find_entry(ctx, x, interval.lo, interval.hi, 64 * static_cast<std::size_t>(2 * m + 3), options);
}

EntryWord entry_word_s3(const BetaContext& ctx, int m, const Real& x, const GeneratorOptions& options) {
  if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "m must be >= 1");
  const auto interval = SteeringInterval::make(ctx);
  return find_entry(ctx, x, interval.lo, interval.hi, 64 * static_cast<std::size_t>(2 * m + 3), options);
}

std::vector<Extension> extend_block_m(const BetaContext& ctx, int m, const Real& orbit) {
  require_block_width(m);
  const auto interval = SteeringIntervalM::make(ctx, m);
  if (!interval.contains(ctx, orbit)) {
    throw BetaError(ErrorKind::InvalidArgument, "orbit " + format_real(orbit) + " is not in I_m");
  }
  // Ties at the pivot take the ones-heavy branch.
  const bool ones_heavy = orbit >= interval.pivot;
  const std::size_t length = static_cast<std::size_t>(2 * m + 1);
  const std::size_t need = static_cast<std::size_t>(m + 1);

  std::vector<Extension> out;
  out.reserve(std::size_t{1} << (2 * m));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << length); ++mask) {
    const auto ones = static_cast<std::size_t>(std::popcount(mask));
    if ((ones_heavy ? ones : length - ones) < need) continue;
    BinaryWord block = BinaryWord::from_bits(mask, length);
    Real value = apply_word(ctx, block, orbit);
    if (!interval.contains(ctx, value)) {
      throw BetaError(ErrorKind::ContainmentViolation,
                      "block " + block.to_string() + " maps orbit " + format_real(orbit) + " to " +
                          format_real(value) + ", outside I_" + std::to_string(m) + " = [" +
                          format_real(interval.lo) + ", " + format_real(interval.hi) + "]");
    }
    out.push_back({std::move(block), std::move(value)});
  }
  return out;
}

std::pair<Extension, Extension> extend_block_s3(const BetaContext& ctx, int m, const Real& orbit) {
  if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "m must be >= 1");
  const auto interval = SteeringInterval::make(ctx);
  if (!interval.contains(ctx, orbit)) {
    throw BetaError(ErrorKind::InvalidArgument, "orbit " + format_real(orbit) + " is not in I");
  }
  const auto max_forced = static_cast<std::size_t>(m + 1);
  BinaryWord forced;
  Real y = orbit;
  if (!interval.in_core(ctx, y)) {
    const int digit = y < interval.core_lo ? 0 : 1;
    while (!interval.in_core(ctx, y)) {
      if (forced.size() == max_forced) {
        throw BetaError(ErrorKind::ContainmentViolation,
                        "orbit " + format_real(orbit) + " needs more than " +
                            std::to_string(max_forced) + " forced steps to reach the core");
      }
      y = apply_map(ctx, digit, y);
      forced.push_back(digit);
    }
  }

  WordSearch search(ctx, interval.lo, interval.hi);
  const std::size_t steer_length = max_forced - forced.size();
  auto branch = [&](int digit) {
    BinaryWord block = forced;
    block.push_back(digit);
    const Real start = apply_map(ctx, digit, y);
    auto steer = search.find(start, steer_length);
    if (!steer) {
      throw BetaError(ErrorKind::NoSteeringWord,
                      "no word of length " + std::to_string(steer_length) + " returns " +
                          format_real(start) + " to I after branch " + std::to_string(digit));
    }
    block.append(*steer);
    Real value = apply_word(ctx, block, orbit);
    if (!interval.contains(ctx, value)) {
      throw BetaError(ErrorKind::ContainmentViolation,
                      "block " + block.to_string() + " leaves I: " + format_real(value));
    }
    return Extension{std::move(block), std::move(value)};
  };
  Extension zero = branch(0);
  Extension one = branch(1);
  return {std::move(zero), std::move(one)};
}

GeneratorRun run_generator_m(const BetaContext& ctx, int m, const Real& x, std::size_t num_blocks,
                             const GeneratorOptions& options) {
  require_block_width(m);
  const Real threshold = omega(m, options.threshold_tol);
  if (ctx.beta() > threshold) {
    throw BetaError(ErrorKind::InvalidArgument, "beta = " + format_real(ctx.beta()) +
                                                    " exceeds omega_" + std::to_string(m) + " = " +
                                                    format_real(threshold));
  }
  require_survivors(static_cast<std::size_t>(2 * m), num_blocks, options.survivor_cap);
  const EntryWord entry = entry_word_m(ctx, m, x, options);

  GeneratorRun run;
  run.mode = GeneratorMode::Block;
  run.m = m;
  run.beta = ctx.beta();
  run.x = x;
  run.block_length = static_cast<std::size_t>(2 * m + 1);
  run.branch_bits = static_cast<std::size_t>(2 * m);
  return run_stages(std::move(run), entry, num_blocks,
                    [&](const Real& orbit) { return extend_block_m(ctx, m, orbit); });
}

GeneratorRun run_generator_s3(const BetaContext& ctx, int m, const Real& x, std::size_t num_blocks,
                              const GeneratorOptions& options) {
  if (m < 1) throw BetaError(ErrorKind::InvalidArgument, "m must be >= 1");
  const Real threshold = lambda(m, options.threshold_tol);
  if (ctx.beta() > threshold) {
    throw BetaError(ErrorKind::InvalidArgument, "beta = " + format_real(ctx.beta()) +
                                                    " exceeds lambda_" + std::to_string(m) + " = " +
                                                    format_real(threshold));
  }
  require_survivors(1, num_blocks, options.survivor_cap);
  const EntryWord entry = entry_word_s3(ctx, m, x, options);

  GeneratorRun run;
  run.mode = GeneratorMode::Pair;
  run.m = m;
  run.beta = ctx.beta();
  run.x = x;
  run.block_length = static_cast<std::size_t>(m + 2);
  run.branch_bits = 1;
  return run_stages(std::move(run), entry, num_blocks, [&](const Real& orbit) {
    auto [a, b] = extend_block_s3(ctx, m, orbit);
    std::vector<Extension> out;
    out.push_back(std::move(a));
    out.push_back(std::move(b));
    return out;
  });
}

namespace {

class AuditLog {
 public:
  explicit AuditLog(RunAudit& audit) : audit_(audit) {}
  void fail(std::size_t& counter, const std::string& message) {
    ++counter;
    if (audit_.messages.size() < 20) audit_.messages.push_back(message);
  }

 private:
  RunAudit& audit_;
};

// beta^len * y - digits, over word[first, end).
Real apply_suffix(const BetaContext& ctx, const BinaryWord& word, std::size_t first, const Real& y) {
  Real digits_part = 0;
  for (std::size_t n = first; n < word.size(); ++n) {
    digits_part = digits_part * ctx.beta();
    if (word[n]) digits_part += 1;
  }
  return boost::multiprecision::pow(ctx.beta(), static_cast<int>(word.size() - first)) * y - digits_part;
}

}  // namespace

RunAudit audit_run(const BetaContext& ctx, const GeneratorRun& run, std::size_t enumeration_max_length) {
  RunAudit audit;
  AuditLog log(audit);
  if (run.stages.empty()) return audit;

  const std::size_t j = run.entry_steps();
  const std::size_t L = run.block_length;
  const std::size_t S = run.num_blocks();
  const double b = static_cast<double>(run.branch_bits);
  Real lo, hi;
  if (run.mode == GeneratorMode::Block) {
    const auto interval = SteeringIntervalM::make(ctx, run.m);
    lo = interval.lo;
    hi = interval.hi;
  } else {
    const auto interval = SteeringInterval::make(ctx);
    lo = interval.lo;
    hi = interval.hi;
  }

  // Count law and containment, with orbits recomputed from the entry point.
  const Real entry_orbit = apply_word(ctx, run.entry_word, run.x);
  if (!is_prefix(ctx, run.x, run.entry_word)) {
    log.fail(audit.soundness_violations, "entry word is not a prefix of x");
  }
  for (std::size_t s = 0; s <= S; ++s) {
    const auto& stage = run.stages[s];
    const std::size_t expected = std::size_t{1} << (run.branch_bits * s);
    if (stage.words.size() != expected) {
      log.fail(audit.count_law_violations, "stage " + std::to_string(s) + " has " +
                                               std::to_string(stage.words.size()) + " words, expected " +
                                               std::to_string(expected));
    }
    const bool has_orbits = stage.orbits.size() == stage.words.size();
    for (std::size_t i = 0; i < stage.words.size(); ++i) {
      const auto& w = stage.words[i];
      if (w.size() != j + s * L || !w.starts_with(run.entry_word)) {
        log.fail(audit.count_law_violations, "stage " + std::to_string(s) + " word has wrong shape");
        continue;
      }
      const Real value = apply_suffix(ctx, w, j, entry_orbit);
      if (has_orbits && abs(value - stage.orbits[i]) > ctx.tolerance() * (1 + abs(value))) {
        log.fail(audit.containment_violations, "word " + w.to_string() + " does not match its recorded orbit");
      }
      if (!ctx.in_closed(value, lo, hi)) {
        log.fail(audit.containment_violations,
                 "word " + w.to_string() + " has orbit " + format_real(value) + " outside the steering interval");
      }
    }
  }

  // Soundness on the full words, through the direct inequality rather than the orbit path.
  {
    const auto& words = run.stages.back().words;
    const auto n = static_cast<std::ptrdiff_t>(words.size());
    std::vector<char> bad(words.size(), 0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      bad[static_cast<std::size_t>(i)] = is_prefix(ctx, run.x, words[static_cast<std::size_t>(i)]) ? 0 : 1;
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (bad[i]) log.fail(audit.soundness_violations, "word " + words[i].to_string() + " is not a prefix of x");
    }
  }

  const auto& final_words = run.stages.back().words;
  const std::size_t N = final_words.size();
  if (N == 0) return audit;
  for (std::size_t i = 1; i < N; ++i) {
    if (!(final_words[i - 1] < final_words[i])) {
      log.fail(audit.count_law_violations, "final stage is not strictly increasing");
      break;
    }
  }

  // Truncations of the final words at block boundaries must reproduce each stage.
  for (std::size_t s = 0; s < S; ++s) {
    const auto& stage_words = run.stages[s].words;
    std::size_t idx = 0;
    bool ok = true;
    for (std::size_t i = 0; i < N && ok; ++i) {
      const BinaryWord head = final_words[i].prefix(j + s * L);
      if (i > 0 && final_words[i - 1].common_prefix_length(final_words[i]) >= j + s * L) continue;
      ok = idx < stage_words.size() && stage_words[idx] == head;
      ++idx;
    }
    if (!ok || idx != stage_words.size()) {
      log.fail(audit.bridge_violations, "stage " + std::to_string(s) + " differs from the truncated final stage");
    }
  }

  // lcp[i]: common digits of final words i-1 and i beyond the entry word.
  const std::size_t depth = S * L;
  std::vector<std::size_t> lcp(N, 0);
  for (std::size_t i = 1; i < N; ++i) {
    lcp[i] = std::min(depth, final_words[i - 1].common_prefix_length(final_words[i]) - j);
  }

  // Distinct truncations at relative depth u, overall.
  std::vector<std::size_t> distinct(depth + 1, 1);
  {
    std::vector<std::size_t> hist(depth + 1, 0);
    for (std::size_t i = 1; i < N; ++i) ++hist[lcp[i]];
    std::size_t below = 0;
    for (std::size_t u = 0; u <= depth; ++u) {
      distinct[u] = 1 + below;
      below += hist[u];
    }
  }
  for (std::size_t u = 0; u <= depth; ++u) {
    if (u > 0 && distinct[u] < distinct[u - 1]) {
      log.fail(audit.monotonicity_violations, "prefix count decreases at length " + std::to_string(j + u));
    }
    const double bound = b * (static_cast<double>(u) / static_cast<double>(L) - 1.0);
    if (std::log2(static_cast<double>(distinct[u])) < bound - 1e-12) {
      log.fail(audit.lower_count_violations, "only " + std::to_string(distinct[u]) + " prefixes at length " +
                                                 std::to_string(j + u));
    }
  }

  // Descendant counts of every word at every relative depth t.
  std::vector<std::size_t> hist(depth + 1, 0);
  for (std::size_t t = 0; t <= depth; ++t) {
    std::vector<std::size_t> max_desc(depth + 1, 0);
    std::size_t i = 0;
    while (i < N) {
      std::size_t end = i + 1;
      while (end < N && lcp[end] >= t) ++end;
      std::fill(hist.begin(), hist.end(), 0);
      for (std::size_t q = i + 1; q < end; ++q) ++hist[lcp[q]];
      std::size_t below = 0;
      for (std::size_t u = 0; u <= depth; ++u) {
        const std::size_t desc = 1 + below;
        below += hist[u];
        if (u < t) continue;
        max_desc[u] = std::max(max_desc[u], desc);
        if (t % L == 0 && u % L == 0) {
          const std::size_t expected = std::size_t{1} << (run.branch_bits * ((u - t) / L));
          if (desc != expected) {
            log.fail(audit.bridge_violations, "a word of length " + std::to_string(j + t) + " has " +
                                                  std::to_string(desc) + " descendants at length " +
                                                  std::to_string(j + u) + ", expected " +
                                                  std::to_string(expected));
          }
        }
      }
      i = end;
    }
    for (std::size_t u = t; u <= depth; ++u) {
      const double bound = b * (static_cast<double>(u - t) / static_cast<double>(L) + 2.0);
      if (std::log2(static_cast<double>(max_desc[u])) > bound + 1e-12) {
        log.fail(audit.upper_count_violations, std::to_string(max_desc[u]) + " descendants from length " +
                                                   std::to_string(j + t) + " to " + std::to_string(j + u));
      }
    }
  }

  // Literal subset check against the orbit-tree enumeration when it is small enough.
  const std::size_t final_length = j + depth;
  if (final_length <= enumeration_max_length) {
    try {
      const PrefixSet all = enumerate_prefixes_branching(ctx, run.x, final_length);
      audit.enumeration_checked = true;
      for (const auto& w : final_words) {
        if (!all.contains(w)) log.fail(audit.enumeration_mismatches, "word " + w.to_string() + " missing from enumeration");
      }
    } catch (const BetaError& e) {
      if (e.kind() != ErrorKind::MemoryGuard) throw;
    }
  }
  return audit;
}

void write_records(std::ostream& out, const GeneratorRun& run) {
  nlohmann::json header = {{"record", "generator_run"},
                           {"mode", to_string(run.mode)},
                           {"m", run.m},
                           {"beta", format_real(run.beta)},
                           {"x", format_real(run.x)},
                           {"entry_word", run.entry_word.to_string()},
                           {"entry_steps", run.entry_steps()},
                           {"block_length", run.block_length},
                           {"num_blocks", run.num_blocks()}};
  out << header.dump() << '\n';
  for (std::size_t s = 0; s < run.stages.size(); ++s) {
    const auto& stage = run.stages[s];
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : stage.words) words.push_back(w.to_string());
    nlohmann::json orbits = nlohmann::json::array();
    for (const auto& v : stage.orbits) orbits.push_back(format_real(v));
    nlohmann::json rec = {{"record", "stage"},
                          {"stage", s},
                          {"count", stage.words.size()},
                          {"orbit_min", format_real(stage.orbit_min)},
                          {"orbit_max", format_real(stage.orbit_max)},
                          {"words", std::move(words)},
                          {"orbits", std::move(orbits)}};
    out << rec.dump() << '\n';
  }
}

GeneratorRun read_generator_records(std::istream& in) {
  GeneratorRun run;
  std::string line;
  try {
    if (!std::getline(in, line)) throw BetaError(ErrorKind::InvalidArgument, "empty record stream");
    const auto header = nlohmann::json::parse(line);
    if (header.at("record") != "generator_run") {
      throw BetaError(ErrorKind::InvalidArgument, "expected generator_run header");
    }
    const auto mode = header.at("mode").get<std::string>();
    run.mode = mode == "m" ? GeneratorMode::Block : GeneratorMode::Pair;
    run.m = header.at("m").get<int>();
    run.beta = parse_real(header.at("beta").get<std::string>());
    run.x = parse_real(header.at("x").get<std::string>());
    run.entry_word = BinaryWord(header.at("entry_word").get<std::string>());
    run.block_length = header.at("block_length").get<std::size_t>();
    run.branch_bits = run.mode == GeneratorMode::Block ? static_cast<std::size_t>(2 * run.m) : 1;
    const auto blocks = header.at("num_blocks").get<std::size_t>();
    for (std::size_t s = 0; s <= blocks; ++s) {
      if (!std::getline(in, line)) throw BetaError(ErrorKind::InvalidArgument, "record stream truncated");
      const auto rec = nlohmann::json::parse(line);
      GeneratorStage stage;
      for (const auto& w : rec.at("words")) stage.words.emplace_back(w.get<std::string>());
      for (const auto& v : rec.at("orbits")) stage.orbits.push_back(parse_real(v.get<std::string>()));
      stage.orbit_min = parse_real(rec.at("orbit_min").get<std::string>());
      stage.orbit_max = parse_real(rec.at("orbit_max").get<std::string>());
      run.stages.push_back(std::move(stage));
    }
  } catch (const nlohmann::json::exception& e) {
    throw BetaError(ErrorKind::InvalidArgument, std::string("malformed record: ") + e.what());
  }
  return run;
}

}  // namespace betaexp

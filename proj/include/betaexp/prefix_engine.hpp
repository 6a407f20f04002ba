#pragma once

#include "betaexp/binary_word.hpp"
#include "betaexp/numeric_core.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace betaexp {

/// All valid k-prefixes of x, in lexicographic order, each with the orbit value a(x).
struct PrefixSet {
  Real beta;
  Real x;
  std::size_t k = 0;
  std::vector<BinaryWord> words;
  std::vector<Real> orbit_values;

  std::size_t count() const noexcept { return words.size(); }
  bool contains(const BinaryWord& word) const;
  std::optional<Real> orbit_value(const BinaryWord& word) const;
};

inline constexpr std::size_t kDefaultSurvivorCap = 10'000'000;
inline constexpr std::size_t kDirectEnumerationCap = 24;
/// Longest word length the counting kernel accepts.
inline constexpr std::size_t kMaxCountLength = 64;

/// Throws BetaError(InvalidPoint) unless x lies in [0, 1/(beta-1)] up to tolerance.
void require_in_support(const BetaContext& ctx, const Real& x);

/// Orbit-tree expansion: a child is kept iff its parent was kept and its orbit value is in
/// the closed support interval. Runs the OpenMP kernel. Throws MemoryGuard when more than
/// `survivor_cap` words would be materialized.
PrefixSet enumerate_prefixes_branching(const BetaContext& ctx, const Real& x, std::size_t k,
                                       std::size_t survivor_cap = kDefaultSurvivorCap);

/// Brute force over all 2^k digit words against
///   x - beta^-k/(beta-1) <= sum_n eps_n beta^-n <= x.
/// Shares no code with the branching path. Throws CapExceeded for k > cap.
PrefixSet enumerate_prefixes_direct(const BetaContext& ctx, const Real& x, std::size_t k,
                                    std::size_t cap = kDirectEnumerationCap);

/// N_k(x, beta). Depth-first count; memory is O(k), not O(N_k).
std::uint64_t count_prefixes(const BetaContext& ctx, const Real& x, std::size_t k);

/// N_0 .. N_kmax in one traversal.
std::vector<std::uint64_t> count_prefixes_by_length(const BetaContext& ctx, const Real& x,
                                                    std::size_t k_max);

/// True iff the word keeps x inside the support interval.
bool is_prefix(const BetaContext& ctx, const Real& x, const BinaryWord& word);

struct GrowthEstimate {
  std::vector<std::size_t> k_values;
  std::vector<double> log2_counts;
  /// min / max of log2(N_k)/k over k in [ceil(k_max/2), k_max].
  double lower_slope = 0;
  double upper_slope = 0;

  double slope_at(std::size_t k) const;
};

/// Requires 8 <= k_min <= k_max <= 64. Throws MemoryGuard if some N_k exceeds `count_cap`.
GrowthEstimate growth_estimate(const BetaContext& ctx, const Real& x, std::size_t k_min,
                               std::size_t k_max, std::uint64_t count_cap = std::uint64_t{1} << 40);

// Serialization.
//
// Text: one word per line as ASCII 0/1, then a trailer line "count=<N>".
// Records: JSON lines; a header {"record":"prefix_set","beta","x","k","count"} followed by
// one {"record":"prefix","word","orbit_value"} per word. Reals are decimal strings.

std::string to_text(const PrefixSet& set);
/// Returns the words; throws InvalidArgument on a malformed body or a count mismatch.
std::vector<BinaryWord> parse_text(const std::string& text);

void write_records(std::ostream& out, const PrefixSet& set);
PrefixSet read_records(std::istream& in);

}  // namespace betaexp

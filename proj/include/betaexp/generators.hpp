#pragma once

#include "betaexp/binary_word.hpp"
#include "betaexp/numeric_core.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace betaexp {

/// [(-b^(2m+2)+b+1)/(b^2-1), b^(2m+2)/(b^2-1)], split at pivot 1/(b^2-1).
struct SteeringIntervalM {
  int m = 0;
  Real lo;
  Real hi;
  Real pivot;

  /// Throws InvalidArgument for m < 1.
  static SteeringIntervalM make(const BetaContext& ctx, int m);
  bool contains(const BetaContext& ctx, const Real& y) const { return ctx.in_closed(y, lo, hi); }
};

/// [(1+b-b^2)/(b^2-1), b^2/(b^2-1)] around the core [1/(b^2-1), b/(b^2-1)].
struct SteeringInterval {
  Real lo;
  Real hi;
  Real core_lo;
  Real core_hi;

  static SteeringInterval make(const BetaContext& ctx);
  bool contains(const BetaContext& ctx, const Real& y) const { return ctx.in_closed(y, lo, hi); }
  bool in_core(const BetaContext& ctx, const Real& y) const {
    return ctx.in_closed(y, core_lo, core_hi);
  }
};

/// Block: every block of 2m+1 digits offers 2^(2m) continuations.
/// Pair: every block of m+2 digits offers 2 continuations.
enum class GeneratorMode { Block, Pair };

std::string to_string(GeneratorMode mode);

struct EntryWord {
  BinaryWord word;
  Real orbit;
  std::size_t steps() const noexcept { return word.size(); }
};

struct Extension {
  BinaryWord block;
  Real orbit;
};

struct GeneratorOptions {
  /// Extra entry-search depth on top of the forced run to the core. 0 means 64*(2m+3).
  std::size_t entry_depth_slack = 0;
  std::size_t survivor_cap = 10'000'000;
  double threshold_tol = 1e-30;
};

/// Shortest word taking x into the steering interval with every intermediate orbit value in
/// the support; ties broken lexicographically. Throws Unreachable past the depth cap.
EntryWord entry_word_m(const BetaContext& ctx, int m, const Real& x, const GeneratorOptions& options = {});
EntryWord entry_word_s3(const BetaContext& ctx, int m, const Real& x, const GeneratorOptions& options = {});

/// All 2^(2m) blocks of length 2m+1 with at least m+1 ones (orbit >= pivot) or at least m+1
/// zeros (orbit < pivot), in lexicographic order. Throws ContainmentViolation if one leaves I_m.
std::vector<Extension> extend_block_m(const BetaContext& ctx, int m, const Real& orbit);

/// The two blocks of length m+2 from an orbit value inside the steering interval.
/// Throws ContainmentViolation when more than m+1 forced steps are needed to reach the
/// core, NoSteeringWord when no return word exists.
std::pair<Extension, Extension> extend_block_s3(const BetaContext& ctx, int m, const Real& orbit);

struct GeneratorStage {
  std::vector<BinaryWord> words;
  std::vector<Real> orbits;
  Real orbit_min;
  Real orbit_max;
};

struct GeneratorRun {
  GeneratorMode mode = GeneratorMode::Block;
  int m = 0;
  Real beta;
  Real x;
  BinaryWord entry_word;
  std::size_t block_length = 0;
  /// log2 of the number of continuations per block: 2m or 1.
  std::size_t branch_bits = 0;
  /// stages[0] holds the entry word alone.
  std::vector<GeneratorStage> stages;

  std::size_t entry_steps() const noexcept { return entry_word.size(); }
  std::size_t num_blocks() const noexcept { return stages.empty() ? 0 : stages.size() - 1; }
};

/// Requires beta <= omega_m (InvalidArgument otherwise) and x interior.
GeneratorRun run_generator_m(const BetaContext& ctx, int m, const Real& x, std::size_t num_blocks,
                             const GeneratorOptions& options = {});
/// Requires beta <= lambda_m.
GeneratorRun run_generator_s3(const BetaContext& ctx, int m, const Real& x, std::size_t num_blocks,
                              const GeneratorOptions& options = {});

/// Independent audit of a finished run.
struct RunAudit {
  std::size_t count_law_violations = 0;
  std::size_t containment_violations = 0;
  std::size_t bridge_violations = 0;
  std::size_t lower_count_violations = 0;   // #prefixes >= 2^(b((k-j)/L - 1))
  std::size_t upper_count_violations = 0;   // descendants <= 2^(b((k-l)/L + 2))
  std::size_t monotonicity_violations = 0;
  std::size_t soundness_violations = 0;     // word not a prefix of x
  std::size_t enumeration_mismatches = 0;   // word missing from the branching enumeration
  bool enumeration_checked = false;
  std::vector<std::string> messages;        // first few violations

  std::size_t total() const noexcept {
    return count_law_violations + containment_violations + bridge_violations +
           lower_count_violations + upper_count_violations + monotonicity_violations +
           soundness_violations + enumeration_mismatches;
  }
};

/// The literal subset check against enumerate_prefixes_branching runs only when the final
/// word length is at most `enumeration_max_length`.
RunAudit audit_run(const BetaContext& ctx, const GeneratorRun& run,
                   std::size_t enumeration_max_length = 22);

/// JSON lines: one {"record":"generator_run",...} header, then one {"record":"stage",...}
/// per stage with its words and orbit extrema.
void write_records(std::ostream& out, const GeneratorRun& run);
GeneratorRun read_generator_records(std::istream& in);

}  // namespace betaexp
